#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ffspec/common.hpp"
#include "ffspec/model.hpp"

namespace ffspec {

// f(e^{ip}) on the unit circle: even, equal to f_o for |p| > p_F and to a
// smooth profile inside the sea.
class OccupationSymbol {
public:
    enum class Representation { Step, Sampled, Constant };

    static OccupationSymbol from_step(double p_F);
    static OccupationSymbol from_step_values(double p_F, double f_in, double f_out);
    static OccupationSymbol constant(double c);
    // values on the Chebyshev-Lobatto nodes of [0, p_F] (node 0 is p = p_F)
    static OccupationSymbol from_samples(double p_F, std::vector<double> samples, double f_out = -1.0);
    static OccupationSymbol from_profile(double p_F, int grid_size, const auto& profile, double f_out = -1.0) {
        std::vector<double> s(grid_size + 1);
        for (int k = 0; k <= grid_size; ++k) s[k] = profile(lobatto_node(p_F, grid_size, k));
        return from_samples(p_F, std::move(s), f_out);
    }
    static OccupationSymbol from_occupation(const ReservoirSpec& spec, int grid_size = 64);

    static double lobatto_node(double p_F, int n, int k);

    Representation representation() const { return rep_; }
    double fermi_momentum() const { return p_F_; }
    double f_in() const { return f_in_; }
    double f_out() const { return f_out_; }
    bool has_jump() const { return rep_ != Representation::Constant && f_in_ != f_out_; }
    const std::vector<double>& samples() const { return samples_; }

    double operator()(double p) const;  // f(e^{ip})
    double inside(double p) const;      // smooth profile, |p| <= p_F
    double inside_derivative(double p) const;
    double min_value() const;
    double max_value() const;

    double fourier_coeff(int j) const;
    std::vector<double> fourier_coeffs(int jmax) const;  // j = 0..jmax, OpenMP
    std::vector<double> fourier_coeffs_serial(int jmax) const;

    // p in [0, p_F] with inside(p) = v; empty if v is outside the profile range.
    // Throws if the profile is not monotone and branches are not allowed.
    std::vector<double> theta_of(double v, bool allow_branches = false) const;
    bool inside_monotone() const;

    nlohmann::json to_json() const;
    static OccupationSymbol from_json(const nlohmann::json& j);

private:
    Representation rep_ = Representation::Step;
    double p_F_ = pi / 2;
    double f_in_ = 1.0;
    double f_out_ = -1.0;
    std::vector<double> samples_;

    double inside_quadrature(int j, int panels) const;
    int panels_for(int jmax) const;
};

}  // namespace ffspec
