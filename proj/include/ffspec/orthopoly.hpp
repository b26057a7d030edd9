#pragma once

#include <vector>

#include <json.hpp>

#include "ffspec/gaussian_core.hpp"

namespace ffspec {

struct ChiLadder {
    std::vector<cplx> etas;  // eta_1..eta_N of the unpivoted LU of lambda + cov
    double growth = 0.0;     // max |L_ij|, a conditioning monitor
    cplx product() const;
};

// Unpivoted LU in the given row/column order; throws naming the first singular pivot.
ChiLadder chi_ladder(const Eigen::MatrixXcd& cov, cplx lambda);
ChiLadder chi_ladder(const CovarianceMatrix& cov, cplx lambda);

// GROW_L: D_{k,l,n}/D_{k,l-1,n}; GROW_K: D_{k,l,n}/D_{k-1,l,n}.
cplx det_ratio(const OccupationSymbol& sym, const Geometry& geo, cplx lambda, Kind kind, Growth which);
cplx det_ratio(const std::vector<double>& coeffs, const Geometry& geo, cplx lambda, Kind kind, Growth which);

// chi for the four families: (1,+), (2,+), (1,-), (2,-)
struct ChiFamilies {
    cplx chi1p, chi2p, chi1m, chi2m;
};
ChiFamilies chi_families(const std::vector<double>& coeffs, const Geometry& geo, cplx lambda, Kind kind);

struct Family {
    int sigma = 2;     // 1 or 2
    bool plus = true;  // omega = +
};

struct VectorOrthoPoly {
    Family family;
    Geometry geo;
    std::vector<cplx> psi1;  // coefficients of z^0..z^k
    std::vector<cplx> psi2;  // coefficients of z^0..z^l
    cplx chi;
    cplx eval1(cplx z) const;
    cplx eval2(cplx z) const;
};

VectorOrthoPoly ortho_poly(const CovarianceMatrix& cov, cplx lambda, Family family);

// e_{sigma'} int z^{-j} f^(tau) psi dtheta/2pi, exactly from the coefficients
cplx moment(const std::vector<double>& coeffs, const VectorOrthoPoly& p, int sigma_prime, int j, cplx lambda, Kind kind);

struct TCheckReport {
    cplx t14, chi14, t23, chi23, t41, chi41, t32, chi32;
    double residual14 = 0, residual23 = 0, residual41 = 0, residual32 = 0;
    double max_residual() const;
    nlohmann::json to_json() const;
};

// T(0) entries from solved polynomials (moments by unit-circle quadrature)
// against chi values from determinant ratios.
TCheckReport t_matrix_check(const OccupationSymbol& sym, const Geometry& geo, cplx lambda, Kind kind);

// e_{sigma'} int z^{-j} f^(tau)(z) psi(z) dtheta/2pi by panel quadrature split at +-p_F
cplx moment_quadrature(const OccupationSymbol& sym, const VectorOrthoPoly& p, int sigma_prime, int j, cplx lambda, Kind kind);

}  // namespace ffspec
