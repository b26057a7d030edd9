#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "ffspec/gaussian_core.hpp"
#include "ffspec/specfun.hpp"
#include "ffspec/symbol.hpp"

namespace ffspec {

// Side L expands around z_F, side R around 1/z_F.
enum class Side { L, R };

// Phase of the first bracket term in the R^(out) diagonals.
// PrintedR11: e^{+ip_F} (as printed for R11), PrintedR22: e^{-ip_F} (as printed for R22).
enum class PhaseVariant { PrintedR11, PrintedR22 };

const char* phase_variant_name(PhaseVariant v);
PhaseVariant phase_variant_from_name(const std::string& s);

// Wiener-Hopf factors of (lambda + sigma^2 f) / (e^{i pi beta} theta_FS + e^{-i pi beta}(1 - theta_FS)).
class WienerHopf {
public:
    WienerHopf(const OccupationSymbol& sym, cplx lambda, double sigma2, cplx beta);

    // continuous log of the factorization target at e^{i theta}
    cplx g(double theta) const;
    // |z| <= 1 (boundary value from inside on the circle)
    cplx log_plus(cplx z) const;
    // |z| >= 1 (boundary value from outside on the circle)
    cplx log_minus(cplx z) const;

    std::vector<cplx> log_plus_batch(const std::vector<cplx>& zs) const;  // OpenMP
    std::vector<cplx> log_plus_batch_serial(const std::vector<cplx>& zs) const;

    // |g(p_F - eps) - g(p_F + eps)|, checked at construction
    double continuity_residual() const { return continuity_; }
    // sup over sample points of |log F+ + log F- - g| on the circle
    double factorization_residual(int samples = 64) const;

private:
    const OccupationSymbol* sym_;
    cplx lambda_;
    double sigma2_;
    cplx beta_;
    cplx log_fi_;
    cplx outside_;  // g on the outer arc (constant)
    bool constant_ = false;
    double continuity_ = 0.0;

    cplx cauchy(cplx z, bool interior) const;
};

struct FisherHartwigData {
    cplx lambda;
    Kind kind = Kind::Plain;
    double p_F = pi / 2;
    double f_in = 1.0, f_out = -1.0;
    cplx beta, beta_tilde;
    cplx r, r_tilde;
    cplx s_beta, s_beta_tilde;
    std::shared_ptr<const WienerHopf> wh, wh_tilde;
    cplx d_L, d_tilde_L, d_R, d_tilde_R;

    cplx tau() const { return tau_of(kind); }
    cplx f_plus(cplx z, bool tilde) const;
    cplx f_minus(cplx z, bool tilde) const;
    cplx d(Side s) const { return s == Side::L ? d_L : d_R; }
    cplx d_tilde(Side s) const { return s == Side::L ? d_tilde_L : d_tilde_R; }
};

// max over sigma of |log F+(z_F) - log F+(1/z_F)|; zero when g is constant
double fpm_asymmetry(const FisherHartwigData& fh);

// beta = log((lambda + sigma^2 f_i)/(lambda + sigma^2 f_o))/(2 pi i), Re in (-1/2, 1/2]
cplx fh_beta(cplx lambda, double sigma2, double f_in, double f_out);

// Keeps a pointer to sym; the symbol must outlive the result.
FisherHartwigData fh_data(const OccupationSymbol& sym, cplx lambda, Kind kind);

struct SzegoResult {
    cplx lhs, rhs;
    double residual;
};
// sigma2 = 1 or tau^2
SzegoResult szego_check(const OccupationSymbol& sym, cplx lambda, double sigma2);

enum class Region { Out, MidII, InII, MidI };

struct ParametrixMatrix {
    Eigen::Matrix4cd entries;
    Region region = Region::Out;
    Side side = Side::L;
};

// log x(z), x = (z - z_F)/(z - 1/z_F), arg in (p_F - pi, p_F + pi]
cplx log_x(cplx z, double p_F);

ParametrixMatrix y_out(cplx z, const FisherHartwigData& fh);
// same, for z = z_F e^{zeta} with zeta small (avoids cancellation in z - z_F)
ParametrixMatrix y_out_local(const BranchedComplex& zeta, const FisherHartwigData& fh);

// a-diag(lambda+f, lambda+tau^2 f, -1/(lambda+tau^2 f), -1/(lambda+f)) at e^{i theta}
Eigen::Matrix4cd jump_v2(double theta, const FisherHartwigData& fh, const OccupationSymbol& sym);

// Full jump matrix of the Y problem at z with symbol value f.
Eigen::Matrix4cd jump_v(cplx z, double f, cplx lambda, Kind kind, int k, int l, int m);
Eigen::Matrix4cd o_right(cplx z, Kind kind, int k, int l, int m);
Eigen::Matrix4cd o_left(cplx z, cplx lambda, Kind kind, int k, int l, int m);

// zeta in region II: arg zeta in (pi/2, 3pi/2). Only side L is implemented.
ParametrixMatrix y_mid_II(const BranchedComplex& zeta, const FisherHartwigData& fh, double k, double l, Side side = Side::L);
ParametrixMatrix y_in_II(const BranchedComplex& zeta, const FisherHartwigData& fh, double k, double l, double m,
                         Side side = Side::L);

// Leading terms of Y_mid Y_out^{-1} - 1 in 1/zeta (local variable).
Eigen::Matrix4cd delta_r_mid_out(const BranchedComplex& zeta, const FisherHartwigData& fh, double k, double l);
// Leading 1/(m zeta) matrix of Y_in Y_mid^{-1} - 1 (corrected signs).
Eigen::Matrix4cd delta_r_in_mid(const BranchedComplex& zeta, const FisherHartwigData& fh, double k, double l, double m);

// Log-log slopes of the matching residuals over one decade, minimised over
// directions in region II: mid/out in k zeta (10 -> 100), in/mid in m (1e4 -> 1e5).
struct MatchingReport {
    double mid_out_slope;
    double in_mid_slope;
};
MatchingReport matching_check(const FisherHartwigData& fh);

struct ROutDiag {
    cplx r11, r22;
};

// Closed-form R^(out)(0) diagonals; the symmetrized copy includes the leading term.
ROutDiag r_out_diag(cplx beta, cplx beta_tilde, double p_F, double k, double l, double m,
                    PhaseVariant variant = PhaseVariant::PrintedR11);
ROutDiag r_out_diag(const FisherHartwigData& fh, double k, double l, double m,
                    PhaseVariant variant = PhaseVariant::PrintedR11);

// d/dlambda of the diagonals, via d beta/d lambda (analytic).
ROutDiag r_out_diag_derivative(cplx lambda, Kind kind, double f_in, double f_out, double p_F, double k, double l,
                               double m, PhaseVariant variant = PhaseVariant::PrintedR11);

// GROW_L: D_{k,l,n}/D_{k,l-1,n} ~ R22(0) Y_23(0); GROW_K: D_{k,l,n}/D_{k-1,l,n} ~ R11(0) Y_14(0).
cplx det_ratio_asymptotic(const OccupationSymbol& sym, const Geometry& geo, cplx lambda, Kind kind, Growth which,
                          PhaseVariant variant = PhaseVariant::PrintedR11);

// Variant with the smaller summed error against the exact ratios at the reference point
// (step symbol p_F = pi/2, lambda = 2i, (16,16,128), both kinds and growth directions).
PhaseVariant oracle_preferred_variant();

struct DensitySample {
    double lambda;
    double counting;
    double correction;
    double total() const { return counting + correction; }
};

struct DensityAtom {
    double lambda;
    double mass;
};

struct SpectralDensity {
    std::vector<DensitySample> samples;
    std::vector<DensityAtom> atoms;  // flat parts of f: point masses
};

struct DensityOptions {
    double eta = 1e-4;
    bool allow_branches = false;  // sum over monotone branches of theta(f), experimental
    PhaseVariant variant = PhaseVariant::PrintedR11;
};

// Real-axis Delta d omega / d lambda; correction from the jump of log R across the axis,
// Richardson-extrapolated over {4 eta, 2 eta, eta}.
SpectralDensity spectral_density_change(const OccupationSymbol& sym, const Geometry& geo,
                                        const std::vector<double>& lambda_grid, Kind kind, Growth which,
                                        const DensityOptions& opt = {});
SpectralDensity spectral_density_change_serial(const OccupationSymbol& sym, const Geometry& geo,
                                               const std::vector<double>& lambda_grid, Kind kind, Growth which,
                                               const DensityOptions& opt = {});

// d/dlambda log of the asymptotic ratio, split into the Szego part and log R.
struct DLogRatio {
    cplx szego;
    cplx correction;
    cplx total() const { return szego + correction; }
};
DLogRatio dlog_ratio_asymptotic(const OccupationSymbol& sym, const Geometry& geo, cplx lambda, Kind kind,
                                Growth which, PhaseVariant variant = PhaseVariant::PrintedR11);

std::string density_csv(const SpectralDensity& d);

}  // namespace ffspec
