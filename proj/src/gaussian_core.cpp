#include "ffspec/gaussian_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>

#include <omp.h>

#include "ffspec/format.hpp"

namespace ffspec {

void Geometry::validate() const {
    if (k < 0 || l < 0) throw ConfigError("geometry: k and l must be >= 0");
    if (n < k + 1) throw ConfigError("geometry: intervals overlap, need n >= k+1 (got " + str() + ")");
}

std::string Geometry::str() const {
    return std::to_string(k) + "," + std::to_string(l) + "," + std::to_string(n);
}

SiteLayout SiteLayout::natural(const Geometry& g) { return intervals(0, g.k + 1, g.n, g.l + 1); }

SiteLayout SiteLayout::intervals(int a_first, int a_count, int b_first, int b_count) {
    SiteLayout s;
    for (int i = 0; i < a_count; ++i) {
        s.pos.push_back(a_first + i);
        s.in_b.push_back(false);
    }
    for (int i = 0; i < b_count; ++i) {
        s.pos.push_back(b_first + i);
        s.in_b.push_back(true);
    }
    return s;
}

int SiteLayout::max_lag() const {
    if (pos.empty()) return 0;
    auto [lo, hi] = std::minmax_element(pos.begin(), pos.end());
    return *hi - *lo;
}

Eigen::MatrixXcd assemble(const std::vector<double>& coeffs, const SiteLayout& sites, Kind kind) {
    const int n = sites.size();
    if (sites.max_lag() >= static_cast<int>(coeffs.size()))
        throw ConfigError("covariance: Fourier coefficients do not reach the largest lag");
    const cplx tau = tau_of(kind);
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            cplx v = coeffs[std::abs(sites.pos[i] - sites.pos[j])];
            if (sites.in_b[i]) v *= tau;
            if (sites.in_b[j]) v *= tau;
            m(i, j) = v;
        }
    return m;
}

CovarianceMatrix build_covariance(const std::vector<double>& coeffs, const Geometry& geo, Kind kind) {
    geo.validate();
    return {assemble(coeffs, SiteLayout::natural(geo), kind), geo, kind};
}

CovarianceMatrix build_covariance(const OccupationSymbol& sym, const Geometry& geo, Kind kind) {
    geo.validate();
    return build_covariance(sym.fourier_coeffs_serial(geo.max_lag() + 1), geo, kind);
}

double binary_entropy(double nu) {
    if (nu <= 0.0 || nu >= 1.0) return 0.0;
    return -nu * std::log(nu) - (1.0 - nu) * std::log1p(-nu);
}

SpectrumResult spectrum(const CovarianceMatrix& cov) {
    SpectrumResult res;
    res.kind = cov.kind;
    res.geo = cov.geo;
    const auto& m = cov.entries;
    if (!m.allFinite()) throw NumericalError("gaussian_core", "covariance has non-finite entries");
    if (cov.kind == Kind::Plain) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.real(), Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success)
            throw NumericalError("gaussian_core", "symmetric eigensolver failed (norm " + fmt_g(m.norm()) + ")");
        for (int i = 0; i < es.eigenvalues().size(); ++i) res.eigenvalues.emplace_back(es.eigenvalues()[i], 0.0);
    } else {
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, false);
        if (es.info() != Eigen::Success)
            throw NumericalError("gaussian_core", "complex eigensolver failed (norm " + fmt_g(m.norm()) + ")");
        for (int i = 0; i < es.eigenvalues().size(); ++i) res.eigenvalues.push_back(es.eigenvalues()[i]);
    }
    std::sort(res.eigenvalues.begin(), res.eigenvalues.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    for (cplx v : res.eigenvalues) {
        res.nu_plus.push_back(0.5 * (1.0 + v.real()));
        res.nu_minus.push_back(0.5 * (1.0 - v.real()));
    }
    if (cov.kind == Kind::Plain) {
        res.entropy = entropy(res);
        res.log_negativity = std::nan("");
    } else {
        res.entropy = std::nan("");
        res.log_negativity = log_negativity(res);
    }
    return res;
}

double entropy(const SpectrumResult& res) {
    if (res.kind != Kind::Plain) throw ConfigError("entropy: needs a plain spectrum");
    double s = 0.0;
    bool clipped = false;
    for (cplx v : res.eigenvalues) {
        double x = v.real();
        if (std::abs(x) > 1.0 + 1e-8) throw NumericalError("gaussian_core", "eigenvalue " + fmt_g(x) + " outside [-1, 1]");
        if (std::abs(x) > 1.0) {
            clipped = clipped || std::abs(x) > 1.0 + 1e-12;
            x = std::clamp(x, -1.0, 1.0);
        }
        s += binary_entropy(0.5 * (1.0 + x));
    }
    if (clipped) std::clog << "warning: gaussian_core clipped eigenvalues overshooting [-1, 1]\n";
    return s;
}

double log_negativity(const SpectrumResult& res) {
    double e = 0.0;
    for (cplx v : res.eigenvalues) e += std::log(std::abs(0.5 * (1.0 - v)) + std::abs(0.5 * (1.0 + v)));
    return std::max(e, 0.0);
}

double single_interval_entropy(const OccupationSymbol& sym, int L) {
    if (L < 1) throw ConfigError("single_interval_entropy: L must be >= 1");
    auto c = sym.fourier_coeffs_serial(L);
    Eigen::MatrixXd m = assemble(c, SiteLayout::intervals(0, L, 0, 0), Kind::Plain).real();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("gaussian_core", "symmetric eigensolver failed");
    SpectrumResult r;
    for (int i = 0; i < es.eigenvalues().size(); ++i) r.eigenvalues.emplace_back(es.eigenvalues()[i], 0.0);
    return entropy(r);
}

cplx char_poly(const Eigen::MatrixXcd& m, cplx lambda) {
    Eigen::MatrixXcd a = m;
    a.diagonal().array() += lambda;
    return a.partialPivLu().determinant();
}

cplx char_poly(const CovarianceMatrix& cov, cplx lambda) { return char_poly(cov.entries, lambda); }

std::vector<SpectrumResult> spectra_serial(const OccupationSymbol& sym, const std::vector<Geometry>& geos, Kind kind) {
    int lag = 1;
    for (const auto& g : geos) lag = std::max(lag, g.max_lag() + 1);
    auto c = sym.fourier_coeffs_serial(lag);
    std::vector<SpectrumResult> out;
    for (const auto& g : geos) out.push_back(spectrum(build_covariance(c, g, kind)));
    return out;
}

std::vector<SpectrumResult> spectra(const OccupationSymbol& sym, const std::vector<Geometry>& geos, Kind kind, int jobs) {
    int lag = 1;
    for (const auto& g : geos) {
        g.validate();
        lag = std::max(lag, g.max_lag() + 1);
    }
    auto c = sym.fourier_coeffs(lag);
    const int n = static_cast<int>(geos.size());
    std::vector<SpectrumResult> out(n);
    std::vector<std::string> err(n);
    int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (int i = 0; i < n; ++i) {
        try {
            out[i] = spectrum(build_covariance(c, geos[i], kind));
        } catch (const std::exception& e) {
            err[i] = e.what();
        }
    }
    for (int i = 0; i < n; ++i)
        if (!err[i].empty()) throw NumericalError("gaussian_core", err[i]);
    return out;
}

std::string spectrum_csv(const SpectrumResult& res) {
    std::string s = "index,re_lambda,im_lambda,nu_plus,nu_minus\n";
    for (std::size_t i = 0; i < res.eigenvalues.size(); ++i) {
        s += std::to_string(i) + "," + fmt_g(res.eigenvalues[i].real()) + "," + fmt_g(res.eigenvalues[i].imag()) + "," +
             fmt_g(res.nu_plus[i]) + "," + fmt_g(res.nu_minus[i]) + "\n";
    }
    return s;
}

}  // namespace ffspec
