#include "ffspec/orthopoly.hpp"

#include <cmath>

#include "ffspec/format.hpp"
#include "ffspec/quadrature.hpp"

namespace ffspec {

namespace {

std::vector<double> coeffs_for(const OccupationSymbol& sym, const Geometry& geo) {
    return sym.fourier_coeffs_serial(geo.max_lag() + 2);
}

// Sites for the four chi orderings; the distinguished site goes last.
SiteLayout ordered(const Geometry& g, int which) {
    SiteLayout s;
    auto add = [&](int p, bool b) {
        s.pos.push_back(p);
        s.in_b.push_back(b);
    };
    switch (which) {
        case 0:  // grow B at its right end
            for (int i = 0; i <= g.k; ++i) add(i, false);
            for (int i = 0; i <= g.l; ++i) add(g.n + i, true);
            break;
        case 1:  // grow A at its right end
            for (int i = 0; i < g.k; ++i) add(i, false);
            for (int i = 0; i <= g.l; ++i) add(g.n + i, true);
            add(g.k, false);
            break;
        case 2:  // A_0 last
            for (int i = 1; i <= g.k; ++i) add(i, false);
            for (int i = 0; i <= g.l; ++i) add(g.n + i, true);
            add(0, false);
            break;
        default:  // B_0 last
            for (int i = 0; i <= g.k; ++i) add(i, false);
            for (int i = 1; i <= g.l; ++i) add(g.n + i, true);
            add(g.n, true);
            break;
    }
    return s;
}

cplx last_pivot(const std::vector<double>& coeffs, const SiteLayout& s, cplx lambda, Kind kind) {
    return chi_ladder(assemble(coeffs, s, kind), lambda).etas.back();
}

// determinant with possibly empty intervals
cplx det_sites(const std::vector<double>& coeffs, const SiteLayout& s, cplx lambda, Kind kind) {
    if (s.size() == 0) return 1.0;
    return char_poly(assemble(coeffs, s, kind), lambda);
}

double rel_residual(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

cplx ChiLadder::product() const {
    cplx p = 1.0;
    for (cplx e : etas) p *= e;
    return p;
}

ChiLadder chi_ladder(const Eigen::MatrixXcd& cov, cplx lambda) {
    const int n = static_cast<int>(cov.rows());
    Eigen::MatrixXcd a = cov;
    a.diagonal().array() += lambda;
    const double scale = std::max(a.cwiseAbs().maxCoeff(), 1e-300);
    ChiLadder out;
    // Doolittle, no pivoting: eta_i is the i-th pivot
    for (int i = 0; i < n; ++i) {
        cplx piv = a(i, i);
        if (!(std::abs(piv) > 1e-14 * scale) || !std::isfinite(std::abs(piv)))
            throw NumericalError("orthopoly", "singular leading principal minor at index " + std::to_string(i + 1) + "; perturb lambda off the real axis");
        out.etas.push_back(piv);
        for (int r = i + 1; r < n; ++r) {
            cplx f = a(r, i) / piv;
            out.growth = std::max(out.growth, std::abs(f));
            a.row(r).tail(n - i - 1) -= f * a.row(i).tail(n - i - 1);
        }
    }
    return out;
}

ChiLadder chi_ladder(const CovarianceMatrix& cov, cplx lambda) { return chi_ladder(cov.entries, lambda); }

cplx det_ratio(const std::vector<double>& coeffs, const Geometry& geo, cplx lambda, Kind kind, Growth which) {
    geo.validate();
    if (which == Growth::GrowK && geo.k < 1) throw ConfigError("det_ratio: GROW_K needs k >= 1");
    return last_pivot(coeffs, ordered(geo, which == Growth::GrowL ? 0 : 1), lambda, kind);
}

cplx det_ratio(const OccupationSymbol& sym, const Geometry& geo, cplx lambda, Kind kind, Growth which) {
    return det_ratio(coeffs_for(sym, geo), geo, lambda, kind, which);
}

ChiFamilies chi_families(const std::vector<double>& coeffs, const Geometry& geo, cplx lambda, Kind kind) {
    geo.validate();
    ChiFamilies c;
    c.chi2p = last_pivot(coeffs, ordered(geo, 0), lambda, kind);
    c.chi1p = last_pivot(coeffs, ordered(geo, 1), lambda, kind);
    c.chi1m = last_pivot(coeffs, ordered(geo, 2), lambda, kind);
    c.chi2m = last_pivot(coeffs, ordered(geo, 3), lambda, kind);
    return c;
}

cplx VectorOrthoPoly::eval1(cplx z) const {
    cplx s = 0.0;
    for (auto it = psi1.rbegin(); it != psi1.rend(); ++it) s = s * z + *it;
    return s;
}

cplx VectorOrthoPoly::eval2(cplx z) const {
    cplx s = 0.0;
    for (auto it = psi2.rbegin(); it != psi2.rend(); ++it) s = s * z + *it;
    return s;
}

VectorOrthoPoly ortho_poly(const CovarianceMatrix& cov, cplx lambda, Family family) {
    const Geometry& g = cov.geo;
    const int n = g.size();
    Eigen::MatrixXcd f = cov.entries;
    f.diagonal().array() += lambda;
    const int msig = family.sigma == 1 ? g.k : g.l;
    const int base = family.sigma == 1 ? 0 : g.k + 1;
    VectorOrthoPoly out;
    out.family = family;
    out.geo = g;
    Eigen::VectorXcd x;
    if (family.plus) {
        // unknowns: every coefficient but the monic one; equations: every moment but (sigma, m_sigma)
        const int fixed = base + msig;
        Eigen::MatrixXcd a(n - 1, n - 1);
        Eigen::VectorXcd rhs(n - 1);
        for (int r = 0, rr = 0; r < n; ++r) {
            if (r == fixed) continue;
            for (int c = 0, cc = 0; c < n; ++c) {
                if (c == fixed) continue;
                a(rr, cc++) = f(r, c);
            }
            rhs(rr++) = -f(r, fixed);
        }
        Eigen::VectorXcd y = n > 1 ? Eigen::VectorXcd(a.fullPivLu().solve(rhs)) : Eigen::VectorXcd();
        if (n > 1 && !(a * y).isApprox(rhs, 1e-8)) throw NumericalError("orthopoly", "singular moment system");
        x.resize(n);
        for (int c = 0, cc = 0; c < n; ++c) x(c) = c == fixed ? cplx(1.0) : y(cc++);
        out.chi = (f.row(fixed) * x)(0);
    } else {
        Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n);
        e(base) = 1.0;
        auto lu = f.fullPivLu();
        if (!lu.isInvertible()) throw NumericalError("orthopoly", "singular moment system");
        x = lu.solve(e);
        out.chi = 1.0 / x(base);
    }
    out.psi1.assign(x.data(), x.data() + g.k + 1);
    out.psi2.assign(x.data() + g.k + 1, x.data() + n);
    return out;
}

cplx moment(const std::vector<double>& coeffs, const VectorOrthoPoly& p, int sigma_prime, int j, cplx lambda, Kind kind) {
    const Geometry& g = p.geo;
    const cplx tau = tau_of(kind);
    auto fc = [&](int lag) { return coeffs.at(std::abs(lag)); };
    cplx s = 0.0;
    if (sigma_prime == 1) {
        for (int i = 0; i <= g.k; ++i) s += (double(j == i) * lambda + fc(j - i)) * p.psi1[i];
        for (int i = 0; i <= g.l; ++i) s += tau * fc(j - g.n - i) * p.psi2[i];
    } else {
        for (int i = 0; i <= g.k; ++i) s += tau * fc(j + g.n - i) * p.psi1[i];
        for (int i = 0; i <= g.l; ++i) s += (double(j == i) * lambda + tau * tau * fc(j - i)) * p.psi2[i];
    }
    return s;
}

cplx moment_quadrature(const OccupationSymbol& sym, const VectorOrthoPoly& p, int sigma_prime, int j, cplx lambda, Kind kind) {
    const Geometry& g = p.geo;
    const cplx tau = tau_of(kind);
    const double pf = sym.has_jump() ? sym.fermi_momentum() : pi / 2;
    const int deg = g.n + g.k + g.l + std::abs(j) + 2;
    const int panels = 2 + deg / 8;
    QuadRule rule = gauss_panels(-pi, -pf, panels);
    append_rule(rule, gauss_panels(-pf, pf, panels));
    append_rule(rule, gauss_panels(pf, pi, panels));
    cplx s = 0.0;
    for (std::size_t q = 0; q < rule.x.size(); ++q) {
        double th = rule.x[q];
        cplx z = std::polar(1.0, th);
        double f = sym(th);
        cplx p1 = p.eval1(z), p2 = p.eval2(z);
        cplx row = sigma_prime == 1 ? (lambda + f) * p1 + tau * std::pow(z, g.n) * f * p2
                                    : tau * std::pow(z, -g.n) * f * p1 + (lambda + tau * tau * f) * p2;
        s += rule.w[q] * std::pow(z, -j) * row;
    }
    return s / (2.0 * pi);
}

double TCheckReport::max_residual() const {
    return std::max(std::max(residual14, residual23), std::max(residual41, residual32));
}

nlohmann::json TCheckReport::to_json() const {
    auto c = [](cplx v) { return nlohmann::json::array({v.real(), v.imag()}); };
    return {{"T14", c(t14)}, {"chi14", c(chi14)}, {"residual14", residual14},
            {"T23", c(t23)}, {"chi23", c(chi23)}, {"residual23", residual23},
            {"T41", c(t41)}, {"chi41", c(chi41)}, {"residual41", residual41},
            {"T32", c(t32)}, {"chi32", c(chi32)}, {"residual32", residual32}};
}

TCheckReport t_matrix_check(const OccupationSymbol& sym, const Geometry& geo, cplx lambda, Kind kind) {
    geo.validate();
    if (geo.k < 1 || geo.l < 1) throw ConfigError("t_matrix_check: needs k, l >= 1");
    auto coeffs = coeffs_for(sym, geo);
    const int k = geo.k, l = geo.l, n = geo.n;
    TCheckReport r;

    // row 1: psi^{k(l-1)n}_{1+}, column 4 at z = 0 is the j = k moment of e_1
    Geometry g14{k, l - 1, n};
    auto p14 = ortho_poly(build_covariance(coeffs, g14, kind), lambda, {1, true});
    r.t14 = moment_quadrature(sym, p14, 1, k, lambda, kind);
    r.chi14 = det_sites(coeffs, SiteLayout::intervals(0, k + 1, n, l), lambda, kind) /
              det_sites(coeffs, SiteLayout::intervals(0, k, n, l), lambda, kind);

    // row 2: psi^{(k-1)ln}_{2+}, column 3 at z = 0 is the j = l moment of e_2
    Geometry g23{k - 1, l, n};
    auto p23 = ortho_poly(build_covariance(coeffs, g23, kind), lambda, {2, true});
    r.t23 = moment_quadrature(sym, p23, 2, l, lambda, kind);
    r.chi23 = det_sites(coeffs, SiteLayout::intervals(0, k, n, l + 1), lambda, kind) /
              det_sites(coeffs, SiteLayout::intervals(0, k, n, l), lambda, kind);

    // rows 3 and 4 carry a minus sign in front of the polynomials
    Geometry gm{k - 1, l - 1, n};
    auto cm = build_covariance(coeffs, gm, kind);
    auto p1m = ortho_poly(cm, lambda, {1, false});
    auto p2m = ortho_poly(cm, lambda, {2, false});
    r.t41 = -p1m.eval1(0.0);
    r.t32 = -p2m.eval2(0.0);
    cplx dm = det_sites(coeffs, SiteLayout::intervals(0, k, n, l), lambda, kind);
    r.chi41 = -det_sites(coeffs, SiteLayout::intervals(1, k - 1, n, l), lambda, kind) / dm;
    r.chi32 = -det_sites(coeffs, SiteLayout::intervals(0, k, n + 1, l - 1), lambda, kind) / dm;

    r.residual14 = rel_residual(r.t14, r.chi14);
    r.residual23 = rel_residual(r.t23, r.chi23);
    r.residual41 = rel_residual(r.t41, r.chi41);
    r.residual32 = rel_residual(r.t32, r.chi32);
    return r;
}

}  // namespace ffspec
