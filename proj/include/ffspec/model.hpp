#pragma once

#include <vector>

#include "ffspec/common.hpp"

namespace ffspec {

// Chain coupled to N reservoir levels; units hbar = a = 1.
struct ReservoirSpec {
    double hopping_scale = 1.0;
    double coupling = 0.0;  // alpha
    double band_bottom = 2.5;
    double level_spacing = 0.1;
    std::vector<double> couplings{1.0};  // H_n, n = 1..N
    double fermi_energy = 1.0;

    int level_count() const { return static_cast<int>(couplings.size()); }
    double level(int n) const { return level_spacing * n + band_bottom; }  // G_n, n = 1..N
    void validate() const;
};

struct ModeSolution {
    std::vector<double> roots;    // ascending
    std::vector<double> weights;  // 1 / C_omega^2
};

double dispersion(const ReservoirSpec& spec, double p);
double alpha_tilde(const ReservoirSpec& spec, double omega);

ModeSolution dispersion_roots(const ReservoirSpec& spec, double p);

enum class FermiEdge { Error, Below, Above };

// Sum of weights of roots below the Fermi energy. A root exactly at eps_F is
// an error unless the caller picks a side.
double occupation(const ReservoirSpec& spec, double p, FermiEdge edge = FermiEdge::Error);

double fermi_momentum(const ReservoirSpec& spec);

// Momenta in (0, pi) where a root with nonzero weight crosses eps_F.
std::vector<double> occupation_jumps(const ReservoirSpec& spec, int scan = 2048);

}  // namespace ffspec
