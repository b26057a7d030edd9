#include "ffspec/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/toms748_solve.hpp>

namespace ffspec {

namespace {

struct Pole {
    double g;
    double c;  // alpha^2 Delta H^2
};

std::vector<Pole> active_poles(const ReservoirSpec& s) {
    std::vector<Pole> out;
    double a2d = s.coupling * s.coupling * s.level_spacing;
    for (int n = 1; n <= s.level_count(); ++n) {
        double c = a2d * s.couplings[n - 1] * s.couplings[n - 1];
        if (c > 0.0) out.push_back({s.level(n), c});
    }
    return out;
}

double solve_bracket(const std::vector<Pole>& poles, double eps, double lo, double hi) {
    auto g = [&](double w) {
        double a = 0.0;
        for (const auto& p : poles) a += p.c / (w - p.g);
        return w - eps - a;
    };
    double flo = g(lo), fhi = g(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (flo > 0.0 || fhi < 0.0) throw NumericalError("model", "dispersion root not bracketed");
    std::uintmax_t iters = 200;
    auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-14 * std::max(1.0, std::abs(a)); };
    auto r = boost::math::tools::toms748_solve(g, lo, hi, flo, fhi, tol, iters);
    if (iters >= 200) throw NumericalError("model", "dispersion root did not converge");
    return 0.5 * (r.first + r.second);
}

}  // namespace

void ReservoirSpec::validate() const {
    if (!(hopping_scale > 0.0)) throw ConfigError("model: hopping_scale must be > 0");
    if (!(level_spacing > 0.0)) throw ConfigError("model: level_spacing must be > 0");
    if (couplings.empty()) throw ConfigError("model: need at least one reservoir level");
    for (double h : couplings)
        if (!std::isfinite(h)) throw ConfigError("model: couplings must be finite");
    if (!std::isfinite(coupling) || !std::isfinite(band_bottom) || !std::isfinite(fermi_energy))
        throw ConfigError("model: non-finite parameter");
}

double dispersion(const ReservoirSpec& spec, double p) { return spec.hopping_scale * (1.0 - std::cos(p)); }

double alpha_tilde(const ReservoirSpec& spec, double omega) {
    double a = 0.0;
    for (const auto& p : active_poles(spec)) a += p.c / (omega - p.g);
    return a;
}

ModeSolution dispersion_roots(const ReservoirSpec& spec, double p) {
    spec.validate();
    const double eps = dispersion(spec, p);
    auto poles = active_poles(spec);
    ModeSolution sol;
    // decoupled levels stay put with zero weight
    for (int n = 1; n <= spec.level_count(); ++n) {
        bool active = std::any_of(poles.begin(), poles.end(), [&](const Pole& q) { return q.g == spec.level(n); });
        if (!active) {
            sol.roots.push_back(spec.level(n));
            sol.weights.push_back(0.0);
        }
    }
    auto weight = [&](double w) {
        double s = 0.0;
        for (const auto& q : poles) s += q.c / ((w - q.g) * (w - q.g));
        return 1.0 / (1.0 + s);
    };
    auto push = [&](double w) {
        sol.roots.push_back(w);
        sol.weights.push_back(weight(w));
    };
    if (poles.empty()) {
        push(eps);
    } else {
        double csum = 0.0;
        for (const auto& q : poles) csum += q.c;
        double reach = std::abs(eps) + std::sqrt(csum) + 1.0;
        auto g = [&](double w) { return w - eps - [&] { double a = 0.0; for (const auto& q : poles) a += q.c / (w - q.g); return a; }(); };
        // offset from a pole that lands on the correct side of the root
        auto near = [&](double pole, double dir, double gap) {
            double d = 1e-3 * gap;
            for (int t = 0; t < 60; ++t) {
                double w = pole + dir * d;
                double v = g(w);
                if ((dir > 0 && v < 0) || (dir < 0 && v > 0)) return w;
                d *= 1e-3;
                if (d < std::numeric_limits<double>::denorm_min() * 1e10 + std::abs(pole) * 1e-17) break;
            }
            return pole + dir * std::abs(pole) * 4e-16;
        };
        double first = poles.front().g, last = poles.back().g;
        double lo = first - reach;
        while (g(lo) > 0.0) lo -= 2.0 * reach;
        push(solve_bracket(poles, eps, lo, near(first, -1.0, reach)));
        for (std::size_t i = 0; i + 1 < poles.size(); ++i) {
            double gap = poles[i + 1].g - poles[i].g;
            push(solve_bracket(poles, eps, near(poles[i].g, 1.0, gap), near(poles[i + 1].g, -1.0, gap)));
        }
        double hi = last + reach;
        while (g(hi) < 0.0) hi += 2.0 * reach;
        push(solve_bracket(poles, eps, near(last, 1.0, reach), hi));
    }
    std::vector<std::size_t> idx(sol.roots.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return sol.roots[a] < sol.roots[b]; });
    ModeSolution out;
    for (auto i : idx) {
        out.roots.push_back(sol.roots[i]);
        out.weights.push_back(sol.weights[i]);
    }
    return out;
}

double occupation(const ReservoirSpec& spec, double p, FermiEdge edge) {
    auto sol = dispersion_roots(spec, p);
    double occ = 0.0;
    double tol = 1e-13 * std::max(1.0, std::abs(spec.fermi_energy));
    for (std::size_t j = 0; j < sol.roots.size(); ++j) {
        double d = sol.roots[j] - spec.fermi_energy;
        if (std::abs(d) <= tol && sol.weights[j] > 0.0) {
            if (edge == FermiEdge::Error) throw NumericalError("model", "Fermi energy coincides with a mode; choose a side");
            if (edge == FermiEdge::Below) occ += sol.weights[j];
            continue;
        }
        if (d < 0.0) occ += sol.weights[j];
    }
    return std::clamp(occ, 0.0, 1.0);
}

double fermi_momentum(const ReservoirSpec& spec) {
    spec.validate();
    const double ef = spec.fermi_energy;
    auto poles = active_poles(spec);
    if (!poles.empty() && ef >= poles.front().g)
        throw NumericalError("model", "Fermi energy is not below the coupled reservoir levels; no single-jump Fermi momentum");
    double target = ef - alpha_tilde(spec, ef);
    double c = 1.0 - target / spec.hopping_scale;
    if (!(c > -1.0 && c < 1.0)) throw NumericalError("model", "Fermi energy outside the renormalized band");
    return std::acos(c);
}

std::vector<double> occupation_jumps(const ReservoirSpec& spec, int scan) {
    std::vector<double> jumps;
    auto below = [&](double p) {
        auto sol = dispersion_roots(spec, p);
        std::vector<int> mask;
        for (std::size_t j = 0; j < sol.roots.size(); ++j)
            mask.push_back(sol.weights[j] > 1e-12 && sol.roots[j] < spec.fermi_energy ? 1 : 0);
        return mask;
    };
    auto prev = below(0.0);
    double pp = 0.0;
    for (int i = 1; i <= scan; ++i) {
        double p = pi * i / scan;
        auto cur = below(p);
        if (cur != prev) {
            double a = pp, b = p;
            for (int t = 0; t < 60; ++t) {
                double mid = 0.5 * (a + b);
                (below(mid) == prev ? a : b) = mid;
            }
            int changes = 0;
            for (std::size_t j = 0; j < cur.size() && j < prev.size(); ++j) changes += cur[j] != prev[j];
            for (int c = 0; c < std::max(changes, 1); ++c) jumps.push_back(0.5 * (a + b));
        }
        prev = cur;
        pp = p;
    }
    return jumps;
}

}  // namespace ffspec
