// One line per acceptance criterion; exit status 1 if any fails.
#include <chrono>
#include <cstdio>
#include <string>

#include "cli.hpp"
#include "ffspec/observables.hpp"
#include "ffspec/orthopoly.hpp"

using namespace ffspec;

namespace {

int failures = 0;

void report(int id, const std::string& what, bool ok, const std::string& detail) {
    std::printf("[%s] C%d %s: %s\n", ok ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
    failures += !ok;
}

std::string g(double x) {
    char b[32];
    std::snprintf(b, sizeof b, "%.3g", x);
    return b;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// subset of the verify suite, for a given symbol config
std::vector<cli::CheckResult> suite(const nlohmann::json& symbol, cli::VerifyToggles on) {
    auto cfg = cli::parse_config({{"symbol", symbol}});
    cfg.verify = on;
    return cli::verify_suite(cfg, cli::make_symbol(cfg));
}

std::string summarize(const std::vector<cli::CheckResult>& rs, bool& ok) {
    std::string s;
    for (const auto& r : rs) {
        ok = ok && r.pass();
        s += (s.empty() ? "" : ", ") + r.name + " " + g(r.value) + (r.at_least ? " >= " : " <= ") + g(r.threshold);
    }
    return s;
}

double nearest(const std::vector<cplx>& pool, cplx z) {
    double d = 1e300;
    for (const cplx& w : pool) d = std::min(d, std::abs(w - z));
    return d;
}

}  // namespace

int main() {
    const nlohmann::json step = {{"type", "step"}, {"p_F", pi / 2}};
    const nlohmann::json reservoir = {{"type", "reservoir"}, {"coupling", 0.3}, {"band_bottom", 1.6},
                                      {"level_spacing", 0.05}, {"couplings", std::vector<double>(8, 1.0)},
                                      {"fermi_energy", 1.0}};
    cli::VerifyToggles none{false, false, false, false, false, false};

    {
        auto t0 = std::chrono::steady_clock::now();
        auto on = none;
        on.identities = true;
        bool ok = true;
        std::string d = "step: " + summarize(suite(step, on), ok);
        d += "; reservoir: " + summarize(suite(reservoir, on), ok);
        double t = seconds_since(t0);
        report(1, "identity suite", ok && t < 30.0, d + "; runtime " + g(t) + " s < 30 s");
    }
    {
        auto on = none;
        on.special_functions = true;
        bool ok = true;
        std::string d = summarize(suite(step, on), ok);
        report(2, "special functions", ok, d);
    }
    {
        auto on = none;
        on.szego = true;
        bool ok = true;
        std::string d = summarize(suite(step, on), ok);
        report(3, "Szego relation", ok, d);
    }
    {
        auto on = none;
        on.matching = true;
        bool ok = true;
        std::string d = summarize(suite(step, on), ok);
        report(4, "parametrix matching", ok, d);
    }
    {
        auto t0 = std::chrono::steady_clock::now();
        auto sym = OccupationSymbol::from_step(pi / 2);
        bool ok = true;
        std::string d;
        for (Kind kind : {Kind::Plain, Kind::Negativity}) {
            double e[2];
            int i = 0;
            for (Geometry geo : {Geometry{16, 16, 128}, Geometry{32, 32, 256}}) {
                cplx x = det_ratio(sym, geo, cplx(0, 2), kind, Growth::GrowL);
                cplx a = det_ratio_asymptotic(sym, geo, cplx(0, 2), kind, Growth::GrowL);
                e[i++] = std::abs(a - x) / std::abs(x);
            }
            ok = ok && e[0] <= 0.05 && e[0] / e[1] >= 2.0;
            d += std::string(d.empty() ? "" : "; ") + kind_name(kind) + " err " + g(e[0]) + " <= 0.05, shrink " +
                 g(e[0] / e[1]) + " >= 2";
        }
        double t = seconds_since(t0);
        report(5, "headline det ratio", ok && t < 120.0, d + "; runtime " + g(t) + " s < 120 s");
    }
    {
        auto sym = OccupationSymbol::from_step(pi / 2);
        Geometry geo{16, 16, 128};
        bool ok = true;
        std::string d;
        for (Kind kind : {Kind::Plain, Kind::Negativity}) {
            double mass = std::abs(density_moment(sym, geo, kind, Growth::GrowL, 0) - 1.0);
            ok = ok && mass <= 0.05;
            d += std::string(d.empty() ? "" : "; ") + kind_name(kind) + " |mass-1| " + g(mass) + " <= 0.05";
            for (int q : {1, 2}) {
                cplx a = density_moment(sym, geo, kind, Growth::GrowL, q);
                cplx x = exact_moment_change(sym, geo, kind, Growth::GrowL, q);
                double e = std::abs(a - x) / std::max(std::abs(x), 1.0);
                ok = ok && e <= 0.05;
                d += ", q=" + std::to_string(q) + " err " + g(e) + " <= 0.05";
            }
        }
        report(6, "spectral density moments", ok, d);
    }
    {
        auto sym = OccupationSymbol::from_step(pi / 2);
        double e[2];
        int i = 0;
        for (Geometry geo : {Geometry{16, 16, 128}, Geometry{32, 32, 256}})
            e[i++] = std::abs(entropy_change(sym, geo, Kind::Plain, Growth::GrowL).total() /
                                  exact_entropy_change(sym, geo, Growth::GrowL) -
                              1.0);
        double s = (single_interval_entropy(sym, 64) - single_interval_entropy(sym, 32)) / (std::log(2.0) / 3.0);
        bool ok = e[0] <= 0.10 && e[1] < e[0] && std::abs(s - 1.0) <= 0.1;
        report(7, "entropy change", ok,
               "err(16) " + g(e[0]) + " <= 0.1, err(32) " + g(e[1]) + " < err(16); S(64)-S(32) = " + g(s) +
                   " x (1/3)ln2 within 0.1");
    }
    {
        auto sym = OccupationSymbol::from_step(pi / 2);
        std::vector<Geometry> geos{{8, 8, 9}, {5, 9, 14}, {12, 7, 30}, {16, 16, 40}, {3, 10, 4}};
        double imag = 0.0, range = 0.0, conj = 0.0, mirror = 0.0;
        for (const auto& geo : geos) {
            for (const cplx& mu : spectrum(build_covariance(sym, geo, Kind::Plain)).eigenvalues) {
                imag = std::max(imag, std::abs(mu.imag()));
                range = std::max(range, std::abs(mu.real()) - 1.0);
            }
            auto neg = spectrum(build_covariance(sym, geo, Kind::Negativity)).eigenvalues;
            for (const cplx& mu : neg) conj = std::max(conj, nearest(neg, std::conj(mu)));
            for (Kind kind : {Kind::Plain, Kind::Negativity}) {
                auto a = spectrum(build_covariance(sym, geo, kind)).eigenvalues;
                auto b = spectrum(build_covariance(sym, geo.mirrored(), kind)).eigenvalues;
                for (const cplx& mu : a) mirror = std::max(mirror, nearest(b, mu));
            }
        }
        double prev = 1e300, worst_neg = 0.0, worst_rise = 0.0;
        for (int n : {9, 10, 12, 16, 24, 40, 72}) {
            double e = negativity_exact(sym, {8, 8, n});
            worst_neg = std::min(worst_neg, e);
            worst_rise = std::max(worst_rise, e - prev);
            prev = e;
        }
        bool ok = imag <= 1e-10 && range <= 1e-10 && conj <= 1e-9 && mirror <= 1e-10 && worst_neg >= -1e-12 &&
                  worst_rise <= 1e-12;
        report(8, "structural spectra", ok,
               "plain |Im| " + g(imag) + " <= 1e-10, |Re|-1 " + g(range) + " <= 1e-10, conjugation " + g(conj) +
                   " <= 1e-9, mirror " + g(mirror) + " <= 1e-10, min E " + g(worst_neg) + " >= 0, max rise " +
                   g(worst_rise) + " <= 0");
    }
    std::printf("%d of 8 criteria failed\n", failures);
    return failures ? 1 : 0;
}
