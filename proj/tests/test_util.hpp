#pragma once

#include <complex>
#include <random>

#include "ffspec/common.hpp"

namespace tu {

using ffspec::cplx;

inline double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

inline std::mt19937_64 rng(std::uint64_t salt = 0) { return std::mt19937_64(0x5eed2024ULL + salt); }

inline double uniform(std::mt19937_64& g, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(g);
}

inline cplx ucplx(std::mt19937_64& g, double lo, double hi) { return {uniform(g, lo, hi), uniform(g, lo, hi)}; }

}  // namespace tu

#include "ffspec/symbol.hpp"

namespace tu {

// Smooth even profile inside the sea built from a short random cosine series.
inline ffspec::OccupationSymbol random_smooth_symbol(std::mt19937_64& g, int grid = 48) {
    double pf = uniform(g, 0.6, 2.4);
    double a1 = uniform(g, -0.2, 0.2), a2 = uniform(g, -0.1, 0.1), c = uniform(g, 0.2, 0.6);
    return ffspec::OccupationSymbol::from_profile(pf, grid, [=](double p) {
        return c + a1 * std::cos(p) + a2 * std::cos(2 * p);
    });
}

}  // namespace tu
