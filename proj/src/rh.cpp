#include "ffspec/rh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ffspec/format.hpp"
#include "ffspec/orthopoly.hpp"
#include "ffspec/quadrature.hpp"

namespace ffspec {

namespace {

cplx cexpm1(cplx z) {
    double x = z.real(), y = z.imag();
    double s = std::sin(0.5 * y);
    return {std::expm1(x) * std::cos(y) - 2.0 * s * s, std::exp(x) * std::sin(y)};
}

cplx s_of(cplx a) { return std::sin(pi * a) / pi; }

// Gamma(1-b)/Gamma(b) = 1/(Gamma(b)^2 s_b), regular at b = 0
cplx gratio(cplx b) { return gamma_fn(1.0 - b) * rgamma(b); }

cplx gratio_derivative(cplx b) {
    cplx psi_rg = std::abs(b) < 1e-12 ? cplx(-1.0) : digamma(b) * rgamma(b);
    return -gamma_fn(1.0 - b) * (digamma(1.0 - b) * rgamma(b) + psi_rg);
}

double wrap(double t) {
    t = std::remainder(t, 2.0 * pi);
    return t;
}

void check_branch_points(cplx lambda, double sigma2, double fi, double fo) {
    for (double f : {fi, fo})
        if (std::abs(lambda + sigma2 * f) < 1e-14 * std::max(1.0, std::abs(lambda)))
            throw ConfigError("rh: lambda = " + fmt_g(lambda.real()) + "," + fmt_g(lambda.imag()) +
                              " is a branch point (lambda + sigma^2 f = 0)");
}

}  // namespace

const char* phase_variant_name(PhaseVariant v) {
    return v == PhaseVariant::PrintedR11 ? "printed_r11" : "printed_r22";
}

PhaseVariant phase_variant_from_name(const std::string& s) {
    if (s == "printed_r11") return PhaseVariant::PrintedR11;
    if (s == "printed_r22") return PhaseVariant::PrintedR22;
    throw ConfigError("unknown phase variant '" + s + "' (expected printed_r11 or printed_r22)");
}

// ---------------------------------------------------------------- Wiener-Hopf

WienerHopf::WienerHopf(const OccupationSymbol& sym, cplx lambda, double sigma2, cplx beta)
    : sym_(&sym), lambda_(lambda), sigma2_(sigma2), beta_(beta) {
    double fi = sym.f_in(), fo = sym.f_out();
    if (sym.representation() == OccupationSymbol::Representation::Constant) fo = fi;
    log_fi_ = std::log(lambda + sigma2 * fi);
    constant_ = sym.representation() != OccupationSymbol::Representation::Sampled;
    cplx at_edge = log_fi_ - I * pi * beta;
    cplx base = std::log(lambda + sigma2 * fo) + I * pi * beta;
    double n = std::round(((at_edge - base) / (2.0 * pi * I)).real());
    outside_ = base + 2.0 * pi * I * n;
    if (sym.representation() == OccupationSymbol::Representation::Constant) outside_ = at_edge;
    double p_F = sym.fermi_momentum();
    if (p_F < pi) {
        const double eps = 1e-9;
        continuity_ = std::abs(g(p_F - eps) - g(p_F + eps));
        if (!(continuity_ < 1e-6))
            throw NumericalError("rh", "Wiener-Hopf integrand is discontinuous at p_F (residual " + fmt_g(continuity_) + ")");
    }
}

cplx WienerHopf::g(double theta) const {
    double t = std::abs(wrap(theta));
    double p_F = sym_->fermi_momentum();
    if (t > p_F) return outside_;
    if (constant_) return log_fi_ - I * pi * beta_;
    cplx num = lambda_ + sigma2_ * sym_->inside(t);
    cplx den = lambda_ + sigma2_ * sym_->f_in();
    return log_fi_ + std::log(num / den) - I * pi * beta_;
}

cplx WienerHopf::cauchy(cplx z, bool interior) const {
    double rho = std::abs(z);
    double tz = rho > 0.0 ? std::arg(z) : 0.0;
    double dist = std::abs(1.0 - rho);
    cplx gz = g(tz);
    double p_F = sym_->fermi_momentum();
    std::vector<double> bps{-pi, pi};
    if (p_F < pi) {
        bps.push_back(-p_F);
        bps.push_back(p_F);
    }
    bool graded = dist < 0.5;
    if (graded) {
        bool dup = false;
        for (double b : bps) dup = dup || std::abs(b - tz) < 1e-14;
        if (!dup) bps.push_back(tz);
    }
    std::sort(bps.begin(), bps.end());
    int levels = graded ? std::clamp(static_cast<int>(std::ceil(std::log(std::max(dist, 1e-300)) / std::log(0.15))) + 2, 2, 16) : 0;
    cplx sum = 0.0;
    for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
        double a = bps[i], b = bps[i + 1];
        if (b - a < 1e-15) continue;
        QuadRule rule;
        bool at_a = graded && std::abs(a - tz) < 1e-14, at_b = graded && std::abs(b - tz) < 1e-14;
        if (at_a || at_b)
            rule = gauss_graded(a, b, levels, at_a);
        else
            rule = gauss_panels(a, b, std::max(2, static_cast<int>(std::ceil((b - a) / 0.5))));
        for (std::size_t q = 0; q < rule.x.size(); ++q) {
            cplx e = std::polar(1.0, rule.x[q]);
            if (e == z) continue;
            sum += rule.w[q] * (g(rule.x[q]) - gz) * e / (e - z);
        }
    }
    sum /= 2.0 * pi;
    return interior ? sum + gz : -sum;
}

cplx WienerHopf::log_plus(cplx z) const {
    if (std::abs(z) > 1.0 + 1e-15) throw NumericalError("rh", "log F+ requested outside the unit disk");
    if (constant_) return g(0.0);
    return cauchy(z, true);
}

cplx WienerHopf::log_minus(cplx z) const {
    if (std::abs(z) < 1.0 - 1e-15) throw NumericalError("rh", "log F- requested inside the unit disk");
    if (constant_) return 0.0;
    return cauchy(z, false);
}

std::vector<cplx> WienerHopf::log_plus_batch(const std::vector<cplx>& zs) const {
    std::vector<cplx> out(zs.size());
    const int n = static_cast<int>(zs.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) out[i] = log_plus(zs[i]);
    return out;
}

std::vector<cplx> WienerHopf::log_plus_batch_serial(const std::vector<cplx>& zs) const {
    std::vector<cplx> out(zs.size());
    for (std::size_t i = 0; i < zs.size(); ++i) out[i] = log_plus(zs[i]);
    return out;
}

double WienerHopf::factorization_residual(int samples) const {
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
        double t = -pi + (s + 0.5) * 2.0 * pi / samples;
        cplx z = std::polar(1.0, t);
        worst = std::max(worst, std::abs(log_plus(z) + log_minus(z) - g(t)));
    }
    return worst;
}

// ---------------------------------------------------------------- FH data

cplx fh_beta(cplx lambda, double sigma2, double f_in, double f_out) {
    check_branch_points(lambda, sigma2, f_in, f_out);
    cplx ratio = (lambda + sigma2 * f_in) / (lambda + sigma2 * f_out);
    cplx b = std::log(ratio) / (2.0 * pi * I);
    // principal Arg in (-pi, pi] puts Re b in (-1/2, 1/2]
    return b;
}

cplx FisherHartwigData::f_plus(cplx z, bool tilde) const { return std::exp((tilde ? wh_tilde : wh)->log_plus(z)); }

cplx FisherHartwigData::f_minus(cplx z, bool tilde) const { return std::exp((tilde ? wh_tilde : wh)->log_minus(z)); }

FisherHartwigData fh_data(const OccupationSymbol& sym, cplx lambda, Kind kind) {
    FisherHartwigData fh;
    fh.lambda = lambda;
    fh.kind = kind;
    fh.p_F = sym.fermi_momentum();
    fh.f_in = sym.f_in();
    fh.f_out = sym.representation() == OccupationSymbol::Representation::Constant ? sym.f_in() : sym.f_out();
    double t2 = tau2_of(kind);
    fh.beta = fh_beta(lambda, 1.0, fh.f_in, fh.f_out);
    fh.beta_tilde = fh_beta(lambda, t2, fh.f_in, fh.f_out);
    fh.r = (lambda + fh.f_in) * std::exp(-I * pi * fh.beta);
    fh.r_tilde = (lambda + t2 * fh.f_in) * std::exp(-I * pi * fh.beta_tilde);
    fh.s_beta = s_of(fh.beta);
    fh.s_beta_tilde = s_of(fh.beta_tilde);
    fh.wh = std::make_shared<WienerHopf>(sym, lambda, 1.0, fh.beta);
    fh.wh_tilde = std::make_shared<WienerHopf>(sym, lambda, t2, fh.beta_tilde);
    if (fh.p_F > 0.0 && fh.p_F < pi) {
        cplx zf = std::polar(1.0, fh.p_F);
        double ls = std::log(2.0 * std::sin(fh.p_F));
        cplx log_l = {ls, pi / 2 - fh.p_F};  // log(1 - z_F^{-2})
        cplx log_r = {ls, fh.p_F - pi / 2};  // log(1 - z_F^{2})
        auto dfac = [&](cplx b, bool tilde, cplx z, cplx lg, double sgn) {
            return std::exp(-I * pi * b) * fh.f_plus(z, tilde) * std::exp(-sgn * b * lg);
        };
        fh.d_L = dfac(fh.beta, false, zf, log_l, 1.0);
        fh.d_tilde_L = dfac(fh.beta_tilde, true, zf, log_l, 1.0);
        fh.d_R = dfac(fh.beta, false, std::conj(zf), log_r, -1.0);
        fh.d_tilde_R = dfac(fh.beta_tilde, true, std::conj(zf), log_r, -1.0);
    } else {
        fh.d_L = fh.d_tilde_L = fh.d_R = fh.d_tilde_R = 1.0;
    }
    return fh;
}

double fpm_asymmetry(const FisherHartwigData& fh) {
    cplx zf = std::polar(1.0, fh.p_F);
    double a = std::abs(fh.wh->log_plus(zf) - fh.wh->log_plus(std::conj(zf)));
    double b = std::abs(fh.wh_tilde->log_plus(zf) - fh.wh_tilde->log_plus(std::conj(zf)));
    return std::max(a, b);
}

SzegoResult szego_check(const OccupationSymbol& sym, cplx lambda, double sigma2) {
    double fo = sym.representation() == OccupationSymbol::Representation::Constant ? sym.f_in() : sym.f_out();
    cplx b = fh_beta(lambda, sigma2, sym.f_in(), fo);
    WienerHopf wh(sym, lambda, sigma2, b);
    double p_F = sym.fermi_momentum();
    SzegoResult res;
    // lim z->0: x(z) -> z_F^2, log x(0) = 2 i p_F on the chosen branch
    res.lhs = 2.0 * I * b * p_F - I * pi * b + wh.log_plus(0.0);
    // independent route: mean of the principal log over the circle
    cplx acc = 0.0;
    auto in = gauss_panels(0.0, p_F, 8);
    for (std::size_t q = 0; q < in.x.size(); ++q) acc += in.w[q] * std::log(lambda + sigma2 * sym(in.x[q]));
    acc += (pi - p_F) * std::log(lambda + sigma2 * fo);
    res.rhs = acc / pi;
    res.residual = std::abs(res.lhs - res.rhs);
    return res;
}

// ---------------------------------------------------------------- outer parametrix

cplx log_x(cplx z, double p_F) {
    cplx zf = std::polar(1.0, p_F);
    cplx x = (z - zf) / (z - std::conj(zf));
    double a = std::arg(x * std::conj(zf)) + p_F;
    return {std::log(std::abs(x)), a};
}

namespace {

ParametrixMatrix outer_from(cplx lx, cplx z, bool inside, const FisherHartwigData& fh) {
    ParametrixMatrix y;
    y.entries.setZero();
    y.region = Region::Out;
    cplx X = std::exp(fh.beta * lx), Xt = std::exp(fh.beta_tilde * lx);
    if (inside) {
        cplx fp = fh.f_plus(z, false), fpt = fh.f_plus(z, true);
        cplx e = std::exp(-I * pi * fh.beta), et = std::exp(-I * pi * fh.beta_tilde);
        y.entries(0, 3) = X * e * fp;
        y.entries(1, 2) = Xt * et * fpt;
        y.entries(2, 1) = -1.0 / (Xt * et * fpt);
        y.entries(3, 0) = -1.0 / (X * e * fp);
    } else {
        cplx fm = fh.f_minus(z, false), fmt = fh.f_minus(z, true);
        y.entries(0, 0) = X / fm;
        y.entries(1, 1) = Xt / fmt;
        y.entries(2, 2) = fmt / Xt;
        y.entries(3, 3) = fm / X;
    }
    return y;
}

}  // namespace

ParametrixMatrix y_out(cplx z, const FisherHartwigData& fh) {
    double rho = std::abs(z);
    if (rho == 1.0) throw NumericalError("rh", "y_out is not defined on the unit circle");
    return outer_from(log_x(z, fh.p_F), z, rho < 1.0, fh);
}

ParametrixMatrix y_out_local(const BranchedComplex& zeta, const FisherHartwigData& fh) {
    cplx zf = std::polar(1.0, fh.p_F);
    cplx ez = std::exp(zeta.value);
    cplx z = zf * ez;
    cplx x = zf * cexpm1(zeta.value) / (z - std::conj(zf));
    double a = std::arg(x * std::conj(zf)) + fh.p_F;
    cplx lx{std::log(std::abs(x)), a};
    if (zeta.value.real() == 0.0) throw NumericalError("rh", "y_out_local on the unit circle");
    auto y = outer_from(lx, z, zeta.value.real() < 0.0, fh);
    y.side = Side::L;
    return y;
}

Eigen::Matrix4cd jump_v2(double theta, const FisherHartwigData& fh, const OccupationSymbol& sym) {
    double f = sym(theta);
    double t2 = tau2_of(fh.kind);
    Eigen::Matrix4cd v = Eigen::Matrix4cd::Zero();
    v(0, 3) = fh.lambda + f;
    v(1, 2) = fh.lambda + t2 * f;
    v(2, 1) = -1.0 / (fh.lambda + t2 * f);
    v(3, 0) = -1.0 / (fh.lambda + f);
    return v;
}

Eigen::Matrix4cd jump_v(cplx z, double f, cplx lambda, Kind kind, int k, int l, int m) {
    cplx tau = tau_of(kind);
    Eigen::Matrix4cd v = Eigen::Matrix4cd::Zero();
    v(0, 0) = std::pow(z, k);
    v(0, 2) = tau * f * std::pow(z, -m);
    v(0, 3) = lambda + f;
    v(1, 1) = std::pow(z, l);
    v(1, 2) = lambda + tau * tau * f;
    v(1, 3) = tau * f * std::pow(z, m);
    v(2, 2) = std::pow(z, -l);
    v(3, 3) = std::pow(z, -k);
    return v;
}

Eigen::Matrix4cd o_right(cplx z, Kind kind, int k, int l, int m) {
    cplx tau = tau_of(kind), t2 = tau * tau;
    const double s = std::sqrt(2.0);
    Eigen::Matrix4cd o = Eigen::Matrix4cd::Zero();
    o(0, 0) = s * std::pow(z, -(k + m));
    o(0, 1) = -t2 * std::pow(z, -(k + m)) / s;
    o(1, 0) = tau * s * std::pow(z, -l);
    o(1, 1) = std::pow(z, -l) / (tau * s);
    o(2, 2) = tau / s;
    o(2, 3) = 1.0 / (tau * s);
    o(3, 2) = -t2 * std::pow(z, -m) / s;
    o(3, 3) = std::pow(z, -m) / s;
    return o;
}

Eigen::Matrix4cd o_left(cplx z, cplx lambda, Kind kind, int k, int l, int m) {
    cplx tau = tau_of(kind), t2 = tau * tau;
    const double s = std::sqrt(2.0);
    cplx zm = std::pow(z, -m);
    Eigen::Matrix4cd o = Eigen::Matrix4cd::Zero();
    o(0, 0) = s * zm;
    o(0, 1) = -t2 * zm / s;
    o(0, 2) = -t2 * lambda * zm / s;
    o(0, 3) = lambda * zm / s;
    o(1, 0) = tau * s;
    o(1, 1) = 1.0 / (tau * s);
    o(1, 2) = tau * lambda / s;
    o(1, 3) = lambda / (tau * s);
    o(2, 2) = tau * std::pow(z, -l) / s;
    o(2, 3) = std::pow(z, -l) / (tau * s);
    o(3, 2) = -t2 * std::pow(z, -(k + m)) / s;
    o(3, 3) = std::pow(z, -(k + m)) / s;
    return o;
}

// ---------------------------------------------------------------- middle and inner parametrices

namespace {

void require_left(Side side) {
    if (side != Side::L)
        throw NumericalError("rh", "local parametrix at 1/z_F is not implemented; use side L (z_F)");
}

}  // namespace

ParametrixMatrix y_mid_II(const BranchedComplex& zeta, const FisherHartwigData& fh, double k, double l, Side side) {
    require_left(side);
    const cplx b = fh.beta, bt = fh.beta_tilde, d = fh.d_L, dt = fh.d_tilde_L;
    BranchedComplex kz = zeta.scaled(k), lz = zeta.scaled(l);
    cplx kb = std::exp(b * std::log(k)), lb = std::exp(bt * std::log(l));
    QP q0k = pq_functions(0, b, kz), q1k = pq_functions(1, b, kz);
    QP q0l = pq_functions(0, bt, lz), q1l = pq_functions(1, bt, lz);
    cplx ek = std::exp(kz.value), el = std::exp(lz.value);
    ParametrixMatrix y;
    y.entries.setZero();
    y.region = Region::MidII;
    y.side = side;
    y.entries(0, 0) = d / (fh.r * kb) * ek * q0k.q;
    y.entries(0, 3) = d / kb * q0k.p;
    y.entries(1, 1) = dt / (fh.r_tilde * lb) * el * q0l.q;
    y.entries(1, 2) = dt / lb * q0l.p;
    cplx c3 = -std::exp(-2.0 * pi * I * bt) * gratio(bt) * lb / dt;
    y.entries(2, 1) = c3 * el * q1l.q;
    y.entries(2, 2) = c3 * fh.r_tilde * q1l.p;
    cplx c4 = -std::exp(-2.0 * pi * I * b) * gratio(b) * kb / d;
    y.entries(3, 0) = c4 * ek * q1k.q;
    y.entries(3, 3) = c4 * fh.r * q1k.p;
    return y;
}

ParametrixMatrix y_in_II(const BranchedComplex& zeta, const FisherHartwigData& fh, double k, double l, double m,
                         Side side) {
    ParametrixMatrix y = y_mid_II(zeta, fh, k, l, side);
    y.region = Region::InII;
    const cplx b = fh.beta, bt = fh.beta_tilde, d = fh.d_L, dt = fh.d_tilde_L, tau = fh.tau();
    BranchedComplex kz = zeta.scaled(k), lz = zeta.scaled(l), mz = zeta.scaled(m);
    cplx kb = std::exp(b * std::log(k)), lb = std::exp(bt * std::log(l));
    QP q0k = pq_functions(0, b, kz), q1k = pq_functions(1, b, kz);
    QP q0l = pq_functions(0, bt, lz), q1l = pq_functions(1, bt, lz);
    cplx A = std::exp(-mz.value) * incomplete_gamma0(mz.rotated(-pi));
    cplx B = std::exp(mz.value) * incomplete_gamma0(mz);
    y.entries(0, 2) = -tau * d * fh.s_beta * q0k.q * A / kb;
    y.entries(1, 3) = -dt * fh.s_beta_tilde * q0l.q * B / (tau * lb);
    y.entries(2, 3) = fh.r_tilde * gratio(bt) * fh.s_beta_tilde * q1l.q * B * lb /
                      (dt * tau * std::exp(2.0 * pi * I * bt));
    y.entries(3, 2) = tau * fh.r * gratio(b) * fh.s_beta * kb / (d * std::exp(2.0 * pi * I * b)) *
                      std::exp(kz.value) * q1k.q * A;
    return y;
}

Eigen::Matrix4cd delta_r_mid_out(const BranchedComplex& zeta, const FisherHartwigData& fh, double k, double l) {
    const cplx b = fh.beta, bt = fh.beta_tilde, d = fh.d_L, dt = fh.d_tilde_L;
    cplx z = zeta.value;
    cplx k2b = std::exp(2.0 * b * std::log(k)), l2b = std::exp(2.0 * bt * std::log(l));
    Eigen::Matrix4cd c = Eigen::Matrix4cd::Zero();
    c(0, 0) = b * b / k;
    c(1, 1) = bt * bt / l;
    c(2, 2) = -bt * bt / l;
    c(3, 3) = -b * b / k;
    c(0, 3) = -(d * d / fh.r) / k2b * gamma_fn(1.0 + b) * rgamma(-b) * std::exp(2.0 * pi * I * b) / k;
    c(3, 0) = std::exp(-2.0 * pi * I * b) * gratio(b) * fh.r * k2b / (d * d) / k;
    c(1, 2) = -(dt * dt / fh.r_tilde) / l2b * gamma_fn(1.0 + bt) * rgamma(-bt) * std::exp(2.0 * pi * I * bt) / l;
    c(2, 1) = std::exp(-2.0 * pi * I * bt) * gratio(bt) * fh.r_tilde * l2b / (dt * dt) / l;
    return c / z;
}

Eigen::Matrix4cd delta_r_in_mid(const BranchedComplex& zeta, const FisherHartwigData& fh, double k, double l, double m) {
    const cplx b = fh.beta, bt = fh.beta_tilde, d = fh.d_L, dt = fh.d_tilde_L, tau = fh.tau();
    const cplx r = fh.r, rt = fh.r_tilde, sb = fh.s_beta, sbt = fh.s_beta_tilde;
    auto E = [](cplx x) { return std::exp(I * pi * x); };
    auto G = gamma_fn;
    cplx kb = std::exp(b * std::log(k)), lb = std::exp(bt * std::log(l));
    Eigen::Matrix4cd f = Eigen::Matrix4cd::Zero();
    // printed matrix with the signs of (1,2), (2,1), (3,1), (4,2) reversed
    f(0, 1) = tau * d * E(b - bt) * lb / (dt * G(bt) * G(-b) * sbt * kb);
    f(0, 2) = tau * dt * d * E(b + bt) / (rt * G(-bt) * G(-b) * sbt * kb * lb);
    f(1, 0) = -dt * E(bt - b) * kb / (tau * d * G(-bt) * G(b) * sb * lb);
    f(1, 3) = -d * dt * E(bt + b) / (tau * r * G(-bt) * G(-b) * sb * kb * lb);
    f(2, 0) = rt * E(-b - bt) * lb * kb / (tau * dt * d * G(bt) * G(b) * sb);
    f(2, 3) = d * rt * E(b - bt) * lb / (dt * r * tau * G(bt) * G(-b) * sb * kb);
    f(3, 1) = -tau * r * E(-b - bt) * lb * kb / (d * dt * G(bt) * G(b) * sbt);
    f(3, 2) = -dt * r * tau * E(bt - b) * kb / (d * rt * G(b) * G(-bt) * lb * sbt);
    return f / (m * zeta.value);
}

// ---------------------------------------------------------------- R^(out) diagonals

MatchingReport matching_check(const FisherHartwigData& fh) {
    auto max_abs = [](const Eigen::Matrix4cd& a) { return a.cwiseAbs().maxCoeff(); };
    MatchingReport rep{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    for (double phi : {2.3, pi, 3.9}) {
        const double k = 1e10, l = 1.3e10;
        double res[2];
        int i = 0;
        for (double kz : {10.0, 100.0}) {
            auto zeta = BranchedComplex::polar(kz / k, phi);
            Eigen::Matrix4cd d = y_mid_II(zeta, fh, k, l).entries * y_out_local(zeta, fh).entries.inverse() -
                                 Eigen::Matrix4cd::Identity();
            res[i++] = max_abs(d - delta_r_mid_out(zeta, fh, k, l));
        }
        rep.mid_out_slope = std::min(rep.mid_out_slope, std::log10(res[0] / res[1]));
        auto zeta = BranchedComplex::polar(1e-3, phi);
        double nrm[2];
        i = 0;
        for (double m : {1e4, 1e5}) {
            Eigen::Matrix4cd d = y_in_II(zeta, fh, 1.0, 1.0, m).entries * y_mid_II(zeta, fh, 1.0, 1.0).entries.inverse() -
                                 Eigen::Matrix4cd::Identity();
            nrm[i++] = max_abs(d);
        }
        rep.in_mid_slope = std::min(rep.in_mid_slope, std::log10(nrm[0] / nrm[1]));
    }
    return rep;
}

namespace {

struct TermParts {
    cplx value, d_b, d_bt;
};

TermParts r_term(cplx b, cplx bt, double p, double k, double l, double m, double ph1) {
    double sp = std::sin(p), asp = std::abs(sp);
    double Lk = std::log(2.0 * k * asp), Ll = std::log(2.0 * l * asp);
    cplx pre = 1.0 / (m * m * 2.0 * I * sp);
    cplx c1 = pre * std::exp(I * ph1 * p), c2 = pre * std::exp(I * p);
    cplx A = std::exp(2.0 * b * Lk), Bf = std::exp(2.0 * bt * Ll);
    cplx gb = gratio(b), gmbt = gratio(-bt), gbt = gratio(bt);
    cplx dgb = gratio_derivative(b);
    TermParts t;
    cplx t1 = c1 * A / Bf * gb * (-gmbt);
    cplx t2 = c2 * A * Bf * gb * gbt;
    t.value = t1 + t2;
    t.d_b = c1 * A / Bf * (-gmbt) * (2.0 * Lk * gb + dgb) + c2 * A * Bf * gbt * (2.0 * Lk * gb + dgb);
    t.d_bt = c1 * A / Bf * gb * (2.0 * Ll * gmbt + gratio_derivative(-bt)) +
             c2 * A * Bf * gb * (2.0 * Ll * gbt + gratio_derivative(bt));
    return t;
}

double ph1_of(PhaseVariant v) { return v == PhaseVariant::PrintedR11 ? 1.0 : -1.0; }

}  // namespace

ROutDiag r_out_diag(cplx b, cplx bt, double p_F, double k, double l, double m, PhaseVariant variant) {
    double ph = ph1_of(variant);
    cplx total = r_term(b, bt, p_F, k, l, m, ph).value + r_term(-b, -bt, -p_F, k, l, m, ph).value;
    return {1.0 - 2.0 * b * b / k + total, 1.0 - 2.0 * bt * bt / l + total};
}

ROutDiag r_out_diag(const FisherHartwigData& fh, double k, double l, double m, PhaseVariant variant) {
    return r_out_diag(fh.beta, fh.beta_tilde, fh.p_F, k, l, m, variant);
}

ROutDiag r_out_diag_derivative(cplx lambda, Kind kind, double f_in, double f_out, double p_F, double k, double l,
                               double m, PhaseVariant variant) {
    double t2 = tau2_of(kind);
    cplx b = fh_beta(lambda, 1.0, f_in, f_out), bt = fh_beta(lambda, t2, f_in, f_out);
    cplx db = (1.0 / (lambda + f_in) - 1.0 / (lambda + f_out)) / (2.0 * pi * I);
    cplx dbt = (1.0 / (lambda + t2 * f_in) - 1.0 / (lambda + t2 * f_out)) / (2.0 * pi * I);
    double ph = ph1_of(variant);
    TermParts p = r_term(b, bt, p_F, k, l, m, ph), q = r_term(-b, -bt, -p_F, k, l, m, ph);
    cplx dt = p.d_b * db + p.d_bt * dbt - q.d_b * db - q.d_bt * dbt;
    return {-4.0 * b * db / k + dt, -4.0 * bt * dbt / l + dt};
}

cplx det_ratio_asymptotic(const OccupationSymbol& sym, const Geometry& geo, cplx lambda, Kind kind, Growth which,
                          PhaseVariant variant) {
    geo.validate();
    if (geo.k < 1 || geo.l < 1) throw ConfigError("det_ratio_asymptotic: k, l >= 1 required");
    FisherHartwigData fh = fh_data(sym, lambda, kind);
    auto y = y_out(0.0, fh);
    if (!sym.has_jump()) {
        return which == Growth::GrowL ? y.entries(1, 2) : y.entries(0, 3);
    }
    ROutDiag r = r_out_diag(fh, geo.k, geo.l, geo.m(), variant);
    return which == Growth::GrowL ? r.r22 * y.entries(1, 2) : r.r11 * y.entries(0, 3);
}

PhaseVariant oracle_preferred_variant() {
    auto sym = OccupationSymbol::from_step(pi / 2);
    Geometry geo{16, 16, 128};
    cplx lam{0.0, 2.0};
    double e11 = 0.0, e22 = 0.0;
    for (Kind kind : {Kind::Plain, Kind::Negativity}) {
        for (Growth w : {Growth::GrowL, Growth::GrowK}) {
            cplx ex = det_ratio(sym, geo, lam, kind, w);
            e11 += std::abs(det_ratio_asymptotic(sym, geo, lam, kind, w, PhaseVariant::PrintedR11) / ex - 1.0);
            e22 += std::abs(det_ratio_asymptotic(sym, geo, lam, kind, w, PhaseVariant::PrintedR22) / ex - 1.0);
        }
    }
    return e11 <= e22 ? PhaseVariant::PrintedR11 : PhaseVariant::PrintedR22;
}

// ---------------------------------------------------------------- densities

DLogRatio dlog_ratio_asymptotic(const OccupationSymbol& sym, const Geometry& geo, cplx lambda, Kind kind,
                                Growth which, PhaseVariant variant) {
    double s2 = which == Growth::GrowL ? tau2_of(kind) : 1.0;
    double p_F = sym.fermi_momentum();
    double fo = sym.representation() == OccupationSymbol::Representation::Constant ? sym.f_in() : sym.f_out();
    DLogRatio out;
    cplx acc = (pi - p_F) / (lambda + s2 * fo);
    if (sym.representation() == OccupationSymbol::Representation::Sampled) {
        auto rule = gauss_panels(0.0, p_F, 8);
        for (std::size_t q = 0; q < rule.x.size(); ++q) acc += rule.w[q] / (lambda + s2 * sym.inside(rule.x[q]));
    } else if (sym.representation() == OccupationSymbol::Representation::Step) {
        acc += p_F / (lambda + s2 * sym.f_in());
    }
    out.szego = acc / pi;
    out.correction = 0.0;
    if (sym.has_jump()) {
        ROutDiag r = r_out_diag(fh_beta(lambda, 1.0, sym.f_in(), fo), fh_beta(lambda, tau2_of(kind), sym.f_in(), fo), p_F,
                                geo.k, geo.l, geo.m(), variant);
        ROutDiag dr = r_out_diag_derivative(lambda, kind, sym.f_in(), fo, p_F, geo.k, geo.l, geo.m(), variant);
        out.correction = which == Growth::GrowL ? dr.r22 / r.r22 : dr.r11 / r.r11;
    }
    return out;
}

namespace {

DensitySample density_at(const OccupationSymbol& sym, const Geometry& geo, double lam, Kind kind, Growth which,
                         const DensityOptions& opt) {
    double s2 = which == Growth::GrowL ? tau2_of(kind) : 1.0;
    DensitySample out{lam, 0.0, 0.0};
    // f(theta) = -lambda / sigma^2 on both branches +-theta
    double v = -lam * s2;
    if (sym.representation() == OccupationSymbol::Representation::Sampled) {
        for (double p : sym.theta_of(v, opt.allow_branches)) {
            double dfp = sym.inside_derivative(p);
            if (std::abs(dfp) > 1e-300) out.counting += 1.0 / (pi * std::abs(dfp));
        }
    }
    if (sym.has_jump()) {
        double fo = sym.f_out();
        auto jump_at = [&](double eta) {
            cplx up{lam, eta}, dn{lam, -eta};
            auto one = [&](cplx z) {
                ROutDiag r = r_out_diag(fh_beta(z, 1.0, sym.f_in(), fo), fh_beta(z, tau2_of(kind), sym.f_in(), fo),
                                        sym.fermi_momentum(), geo.k, geo.l, geo.m(), opt.variant);
                ROutDiag dr = r_out_diag_derivative(z, kind, sym.f_in(), fo, sym.fermi_momentum(), geo.k, geo.l, geo.m(),
                                                    opt.variant);
                return which == Growth::GrowL ? dr.r22 / r.r22 : dr.r11 / r.r11;
            };
            return (one(dn) - one(up)) / (2.0 * pi * I);
        };
        cplx j1 = jump_at(opt.eta), j2 = jump_at(2 * opt.eta), j4 = jump_at(4 * opt.eta);
        out.correction = ((8.0 * j1 - 6.0 * j2 + j4) / 3.0).real();
    }
    return out;
}

std::vector<DensityAtom> atoms_of(const OccupationSymbol& sym, Kind kind, Growth which) {
    double s2 = which == Growth::GrowL ? tau2_of(kind) : 1.0;
    double p_F = sym.fermi_momentum();
    std::vector<DensityAtom> a;
    switch (sym.representation()) {
        case OccupationSymbol::Representation::Constant: a.push_back({-s2 * sym.f_in(), 1.0}); break;
        case OccupationSymbol::Representation::Step:
            a.push_back({-s2 * sym.f_in(), p_F / pi});
            if (p_F < pi) a.push_back({-s2 * sym.f_out(), 1.0 - p_F / pi});
            break;
        case OccupationSymbol::Representation::Sampled:
            if (p_F < pi) a.push_back({-s2 * sym.f_out(), 1.0 - p_F / pi});
            break;
    }
    return a;
}

void check_density_inputs(const OccupationSymbol& sym, const Geometry& geo, const DensityOptions& opt) {
    geo.validate();
    if (geo.k < 1 || geo.l < 1) throw ConfigError("spectral_density_change: k, l >= 1 required");
    if (!(opt.eta > 0.0)) throw ConfigError("spectral_density_change: eta must be positive");
    if (!opt.allow_branches && !sym.inside_monotone())
        throw NumericalError("rh", "inside profile is not monotone: theta(f) is multivalued; enable allow_branches (experimental)");
}

}  // namespace

SpectralDensity spectral_density_change(const OccupationSymbol& sym, const Geometry& geo,
                                        const std::vector<double>& lambda_grid, Kind kind, Growth which,
                                        const DensityOptions& opt) {
    check_density_inputs(sym, geo, opt);
    SpectralDensity out;
    out.samples.resize(lambda_grid.size());
    out.atoms = atoms_of(sym, kind, which);
    const int n = static_cast<int>(lambda_grid.size());
    std::string err;
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
        try {
            out.samples[i] = density_at(sym, geo, lambda_grid[i], kind, which, opt);
        } catch (const std::exception& e) {
#pragma omp critical
            if (err.empty()) err = e.what();
        }
    }
    if (!err.empty()) throw NumericalError("rh", "density evaluation failed: " + err);
    return out;
}

SpectralDensity spectral_density_change_serial(const OccupationSymbol& sym, const Geometry& geo,
                                               const std::vector<double>& lambda_grid, Kind kind, Growth which,
                                               const DensityOptions& opt) {
    check_density_inputs(sym, geo, opt);
    SpectralDensity out;
    out.atoms = atoms_of(sym, kind, which);
    for (double lam : lambda_grid) out.samples.push_back(density_at(sym, geo, lam, kind, which, opt));
    return out;
}

std::string density_csv(const SpectralDensity& d) {
    std::ostringstream os;
    for (const auto& a : d.atoms) os << "# atom," << fmt_g(a.lambda) << "," << fmt_g(a.mass) << "\n";
    os << "re_lambda,density_term_counting,density_term_correction,total\n";
    for (const auto& s : d.samples)
        os << fmt_g(s.lambda) << "," << fmt_g(s.counting) << "," << fmt_g(s.correction) << "," << fmt_g(s.total()) << "\n";
    return os.str();
}

}  // namespace ffspec
