#include "ffspec/symbol.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/tools/toms748_solve.hpp>

#include "ffspec/quadrature.hpp"

namespace ffspec {

namespace {

void check_pf(double p_F) {
    if (!(p_F > 0.0 && p_F < pi)) throw ConfigError("symbol: p_F must lie in (0, pi)");
}

}  // namespace

double OccupationSymbol::lobatto_node(double p_F, int n, int k) {
    return 0.5 * p_F * (1.0 + std::cos(pi * k / n));
}

OccupationSymbol OccupationSymbol::from_step(double p_F) { return from_step_values(p_F, 1.0, -1.0); }

OccupationSymbol OccupationSymbol::from_step_values(double p_F, double f_in, double f_out) {
    check_pf(p_F);
    if (std::abs(f_in) > 1.0 || std::abs(f_out) > 1.0) throw ConfigError("symbol: |f| must not exceed 1");
    OccupationSymbol s;
    s.rep_ = Representation::Step;
    s.p_F_ = p_F;
    s.f_in_ = f_in;
    s.f_out_ = f_out;
    return s;
}

OccupationSymbol OccupationSymbol::constant(double c) {
    if (std::abs(c) > 1.0) throw ConfigError("symbol: |f| must not exceed 1");
    OccupationSymbol s;
    s.rep_ = Representation::Constant;
    s.p_F_ = pi;
    s.f_in_ = c;
    s.f_out_ = c;
    return s;
}

OccupationSymbol OccupationSymbol::from_samples(double p_F, std::vector<double> samples, double f_out) {
    check_pf(p_F);
    if (samples.size() < 3) throw ConfigError("symbol: need at least 3 samples");
    for (double v : samples)
        if (!(std::abs(v) <= 1.0 + 1e-12)) throw ConfigError("symbol: sampled values must lie in [-1, 1]");
    OccupationSymbol s;
    s.rep_ = Representation::Sampled;
    s.p_F_ = p_F;
    s.samples_ = std::move(samples);
    s.f_in_ = s.samples_.front();
    s.f_out_ = f_out;
    return s;
}

OccupationSymbol OccupationSymbol::from_occupation(const ReservoirSpec& spec, int grid_size) {
    if (grid_size < 4) throw ConfigError("symbol: grid_size must be >= 4");
    double p_F = ffspec::fermi_momentum(spec);
    auto jumps = occupation_jumps(spec);
    if (jumps.size() != 1)
        throw NumericalError("symbol", "occupation has " + std::to_string(jumps.size()) + " jumps in (0, pi); exactly one jump pair is supported");
    if (std::abs(jumps.front() - p_F) > 1e-6) throw NumericalError("symbol", "occupation jump does not sit at the Fermi momentum");
    return from_profile(p_F, grid_size, [&](double p) {
        // approach the jump from inside
        return 2.0 * occupation(spec, p, FermiEdge::Below) - 1.0;
    });
}

double OccupationSymbol::inside(double p) const {
    if (rep_ != Representation::Sampled) return f_in_;
    p = std::abs(p);
    const int n = static_cast<int>(samples_.size()) - 1;
    double num = 0.0, den = 0.0;
    for (int k = 0; k <= n; ++k) {
        double x = lobatto_node(p_F_, n, k);
        double d = p - x;
        if (d == 0.0) return samples_[k];
        double w = (k % 2 ? -1.0 : 1.0) * ((k == 0 || k == n) ? 0.5 : 1.0) / d;
        num += w * samples_[k];
        den += w;
    }
    return num / den;
}

double OccupationSymbol::inside_derivative(double p) const {
    if (rep_ != Representation::Sampled) return 0.0;
    double h = 1e-5 * p_F_;
    double a = std::clamp(p - h, 0.0, p_F_), b = std::clamp(p + h, 0.0, p_F_);
    return (inside(b) - inside(a)) / (b - a);
}

double OccupationSymbol::operator()(double p) const {
    p = std::remainder(p, 2.0 * pi);
    if (rep_ == Representation::Constant) return f_in_;
    return std::abs(p) <= p_F_ ? inside(p) : f_out_;
}

double OccupationSymbol::min_value() const {
    if (rep_ != Representation::Sampled) return std::min(f_in_, f_out_);
    double m = f_out_;
    for (int i = 0; i <= 512; ++i) m = std::min(m, inside(p_F_ * i / 512));
    return m;
}

double OccupationSymbol::max_value() const {
    if (rep_ != Representation::Sampled) return std::max(f_in_, f_out_);
    double m = f_out_;
    for (int i = 0; i <= 512; ++i) m = std::max(m, inside(p_F_ * i / 512));
    return m;
}

int OccupationSymbol::panels_for(int jmax) const {
    return 4 + static_cast<int>(std::ceil(jmax * p_F_ / (2.0 * pi)));
}

double OccupationSymbol::inside_quadrature(int j, int panels) const {
    auto rule = gauss_panels(0.0, p_F_, panels);
    double s = 0.0;
    for (std::size_t i = 0; i < rule.x.size(); ++i) s += rule.w[i] * inside(rule.x[i]) * std::cos(j * rule.x[i]);
    return s / pi;
}

double OccupationSymbol::fourier_coeff(int j) const {
    j = std::abs(j);
    if (rep_ == Representation::Constant) return j == 0 ? f_in_ : 0.0;
    double out = j == 0 ? f_out_ * (pi - p_F_) / pi : -f_out_ * std::sin(j * p_F_) / (pi * j);
    if (rep_ == Representation::Step) {
        double in = j == 0 ? f_in_ * p_F_ / pi : f_in_ * std::sin(j * p_F_) / (pi * j);
        return in + out;
    }
    return out + inside_quadrature(j, panels_for(j));
}

std::vector<double> OccupationSymbol::fourier_coeffs_serial(int jmax) const {
    std::vector<double> c(jmax + 1);
    if (rep_ != Representation::Sampled) {
        for (int j = 0; j <= jmax; ++j) c[j] = fourier_coeff(j);
        return c;
    }
    auto rule = gauss_panels(0.0, p_F_, panels_for(jmax));
    std::vector<double> g(rule.x.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = rule.w[i] * inside(rule.x[i]) / pi;
    for (int j = 0; j <= jmax; ++j) {
        double s = j == 0 ? f_out_ * (pi - p_F_) / pi : -f_out_ * std::sin(j * p_F_) / (pi * j);
        for (std::size_t i = 0; i < g.size(); ++i) s += g[i] * std::cos(j * rule.x[i]);
        c[j] = s;
    }
    return c;
}

std::vector<double> OccupationSymbol::fourier_coeffs(int jmax) const {
    std::vector<double> c(jmax + 1);
    if (rep_ != Representation::Sampled) {
        for (int j = 0; j <= jmax; ++j) c[j] = fourier_coeff(j);
        return c;
    }
    auto rule = gauss_panels(0.0, p_F_, panels_for(jmax));
    const int nq = static_cast<int>(rule.x.size());
    std::vector<double> g(nq);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < nq; ++i) g[i] = rule.w[i] * inside(rule.x[i]) / pi;
#pragma omp parallel for schedule(static)
    for (int j = 0; j <= jmax; ++j) {
        double s = j == 0 ? f_out_ * (pi - p_F_) / pi : -f_out_ * std::sin(j * p_F_) / (pi * j);
        for (int i = 0; i < nq; ++i) s += g[i] * std::cos(j * rule.x[i]);
        c[j] = s;
    }
    return c;
}

bool OccupationSymbol::inside_monotone() const {
    if (rep_ != Representation::Sampled) return true;
    const int n = 1024;
    int sign = 0;
    double prev = inside(0.0);
    for (int i = 1; i <= n; ++i) {
        double v = inside(p_F_ * i / n);
        double d = v - prev;
        if (std::abs(d) > 1e-13) {
            int s = d > 0 ? 1 : -1;
            if (sign != 0 && s != sign) return false;
            sign = s;
        }
        prev = v;
    }
    return true;
}

std::vector<double> OccupationSymbol::theta_of(double v, bool allow_branches) const {
    std::vector<double> out;
    if (rep_ != Representation::Sampled) return out;
    if (!allow_branches && !inside_monotone())
        throw NumericalError("symbol", "inside profile is not monotone; theta(f) is multivalued (enable the branch sum)");
    const int n = 1024;
    double a = 0.0, fa = inside(0.0) - v;
    for (int i = 1; i <= n; ++i) {
        double b = p_F_ * i / n, fb = inside(b) - v;
        if (fa == 0.0) {
            out.push_back(a);
        } else if (fa * fb < 0.0) {
            std::uintmax_t it = 100;
            auto tol = [](double x, double y) { return std::abs(x - y) < 1e-15; };
            auto r = boost::math::tools::toms748_solve([&](double p) { return inside(p) - v; }, a, b, fa, fb, tol, it);
            out.push_back(0.5 * (r.first + r.second));
        }
        a = b;
        fa = fb;
    }
    if (fa == 0.0) out.push_back(a);
    return out;
}

nlohmann::json OccupationSymbol::to_json() const {
    nlohmann::json j;
    switch (rep_) {
        case Representation::Step: j["representation"] = "step"; break;
        case Representation::Sampled: j["representation"] = "sampled"; break;
        case Representation::Constant: j["representation"] = "constant"; break;
    }
    j["p_F"] = p_F_;
    j["jump_values"] = {f_in_, f_out_};
    if (rep_ == Representation::Sampled) j["samples"] = samples_;
    return j;
}

OccupationSymbol OccupationSymbol::from_json(const nlohmann::json& j) {
    try {
        std::string rep = j.at("representation").get<std::string>();
        if (rep == "constant") return constant(j.at("jump_values").at(0).get<double>());
        double p_F = j.at("p_F").get<double>();
        auto jv = j.at("jump_values");
        if (rep == "step") return from_step_values(p_F, jv.at(0).get<double>(), jv.at(1).get<double>());
        if (rep == "sampled") return from_samples(p_F, j.at("samples").get<std::vector<double>>(), jv.at(1).get<double>());
        throw ConfigError("symbol: unknown representation '" + rep + "'");
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("symbol: malformed JSON: ") + e.what());
    }
}

}  // namespace ffspec
