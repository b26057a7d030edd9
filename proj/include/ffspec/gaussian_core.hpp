#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ffspec/common.hpp"
#include "ffspec/symbol.hpp"

namespace ffspec {

// A = {0..k}, B = {n..n+l}
struct Geometry {
    int k = 0;
    int l = 0;
    int n = 1;

    int m() const { return n + l - k; }
    int size() const { return k + l + 2; }
    int max_lag() const { return n + l; }
    Geometry mirrored() const { return {l, k, n + l - k}; }
    void validate() const;
    std::string str() const;
};

// Sites with their interval label; B sites carry the tau factors.
struct SiteLayout {
    std::vector<int> pos;
    std::vector<bool> in_b;

    static SiteLayout natural(const Geometry& g);
    static SiteLayout intervals(int a_first, int a_count, int b_first, int b_count);
    int size() const { return static_cast<int>(pos.size()); }
    int max_lag() const;
};

struct CovarianceMatrix {
    Eigen::MatrixXcd entries;
    Geometry geo;
    Kind kind = Kind::Plain;
};

Eigen::MatrixXcd assemble(const std::vector<double>& coeffs, const SiteLayout& sites, Kind kind);

CovarianceMatrix build_covariance(const OccupationSymbol& sym, const Geometry& geo, Kind kind);
CovarianceMatrix build_covariance(const std::vector<double>& coeffs, const Geometry& geo, Kind kind);

struct SpectrumResult {
    Kind kind = Kind::Plain;
    Geometry geo;
    std::vector<cplx> eigenvalues;  // ascending real part, then imaginary part
    std::vector<double> nu_plus;    // Re (1 + lambda)/2
    std::vector<double> nu_minus;   // Re (1 - lambda)/2
    double entropy = 0.0;           // plain only
    double log_negativity = 0.0;    // negativity only
};

SpectrumResult spectrum(const CovarianceMatrix& cov);
double entropy(const SpectrumResult& res);
double log_negativity(const SpectrumResult& res);

// binary entropy H(nu), zero at the endpoints
double binary_entropy(double nu);

// entropy of one interval of L sites (plain kind)
double single_interval_entropy(const OccupationSymbol& sym, int L);

cplx char_poly(const CovarianceMatrix& cov, cplx lambda);
cplx char_poly(const Eigen::MatrixXcd& m, cplx lambda);

// Geometry sweeps; results in input order.
std::vector<SpectrumResult> spectra(const OccupationSymbol& sym, const std::vector<Geometry>& geos, Kind kind, int jobs = 0);
std::vector<SpectrumResult> spectra_serial(const OccupationSymbol& sym, const std::vector<Geometry>& geos, Kind kind);

std::string spectrum_csv(const SpectrumResult& res);

}  // namespace ffspec
