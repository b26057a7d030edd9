#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ffspec/symbol.hpp"
#include "test_util.hpp"

using namespace ffspec;

namespace {

ReservoirSpec small_alpha() {
    ReservoirSpec s;
    s.coupling = 0.25;
    s.band_bottom = 1.6;
    s.level_spacing = 0.05;
    s.couplings = {1.0, 0.8, 0.6, 0.9, 0.5, 0.7, 0.4, 1.0};
    s.fermi_energy = 1.0;
    return s;
}

// adaptive quadrature of (1/2pi) int f(p) e^{-ijp} dp, split at the jumps
double coeff_oracle(const OccupationSymbol& s, int j) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    double pf = s.fermi_momentum();
    auto f = [&](double p) { return s(p) * std::cos(j * p); };
    double v = GK::integrate(f, 0.0, pf, 12, 1e-14) + GK::integrate(f, pf, pi, 12, 1e-14);
    return v / pi;
}

}  // namespace

TEST_CASE("step symbol basics") {
    auto s = OccupationSymbol::from_step(pi / 2);
    CHECK(s(0.0) == 1.0);
    CHECK(s(3.0) == -1.0);
    CHECK(s.f_in() == 1.0);
    CHECK(s.f_out() == -1.0);
    CHECK(std::abs(s.fourier_coeff(1) - 2.0 / pi) < 1e-15);
    CHECK(std::abs(s.fourier_coeff(0)) < 1e-15);
    auto t = OccupationSymbol::from_step(1.1);
    for (int j = 1; j < 40; ++j) {
        CHECK(std::abs(t.fourier_coeff(j) - 2.0 * std::sin(j * 1.1) / (pi * j)) < 1e-15);
        CHECK(t.fourier_coeff(j) == t.fourier_coeff(-j));
    }
    CHECK(std::abs(t.fourier_coeff(0) - (2.0 * 1.1 / pi - 1.0)) < 1e-15);
    CHECK_THROWS_AS(OccupationSymbol::from_step(0.0), ConfigError);
    CHECK_THROWS_AS(OccupationSymbol::from_step(pi), ConfigError);
}

TEST_CASE("constant symbol") {
    auto c = OccupationSymbol::constant(1.0);
    CHECK(c.fourier_coeff(0) == 1.0);
    for (int j = 1; j < 10; ++j) CHECK(c.fourier_coeff(j) == 0.0);
    CHECK(!c.has_jump());
}

TEST_CASE("step coefficients against adaptive quadrature") {
    auto s = OccupationSymbol::from_step(0.9);
    for (int j : {0, 1, 2, 5, 17}) CHECK(std::abs(s.fourier_coeff(j) - coeff_oracle(s, j)) < 1e-12);
}

TEST_CASE("sampled coefficients against adaptive quadrature") {
    auto g = tu::rng(21);
    for (int t = 0; t < 5; ++t) {
        auto s = tu::random_smooth_symbol(g);
        for (int j : {0, 1, 3, 10, 40}) CHECK(std::abs(s.fourier_coeff(j) - coeff_oracle(s, j)) < 1e-12);
    }
}

TEST_CASE("batch coefficients: OpenMP matches serial") {
    auto g = tu::rng(22);
    auto s = tu::random_smooth_symbol(g);
    auto a = s.fourier_coeffs(300), b = s.fourier_coeffs_serial(300);
    for (int j = 0; j <= 300; ++j) CHECK(std::abs(a[j] - b[j]) < 1e-15);
    for (int j : {0, 7, 150, 300}) CHECK(std::abs(a[j] - s.fourier_coeff(j)) < 1e-13);
}

TEST_CASE("Parseval at J = 4096") {
    auto s = OccupationSymbol::from_step(1.3);
    auto c = s.fourier_coeffs(4096);
    double sum = c[0] * c[0];
    for (int j = 1; j <= 4096; ++j) sum += 2 * c[j] * c[j];
    CHECK(std::abs(sum - 1.0) < 1e-3);
    CHECK(std::abs(sum - 1.0) > 1e-6);  // slow decay from the jump is real
}

TEST_CASE("remainder after the step part decays super-algebraically") {
    const double pf = 1.2;
    // flat to all orders at p_F
    auto s = OccupationSymbol::from_profile(pf, 128, [&](double p) {
        return std::abs(p) >= pf ? 0.3 : 0.3 + 0.5 * std::exp(1.0 - pf * pf / (pf * pf - p * p));
    });
    auto step = OccupationSymbol::from_step_values(pf, s.f_in(), s.f_out());
    auto rem = [&](int j) { return std::abs(s.fourier_coeff(j) - step.fourier_coeff(j)); };
    double s1 = std::log2(rem(40) / rem(80)), s2 = std::log2(rem(80) / rem(160));
    CHECK(s2 > 6.0);
    CHECK(s2 > s1 + 2.0);
    // a profile with a kink at p_F stays algebraic
    auto k = OccupationSymbol::from_profile(pf, 64, [](double p) { return 0.6 - 0.2 * p * p; });
    auto ks = OccupationSymbol::from_step_values(pf, k.f_in(), k.f_out());
    auto krem = [&](int j) { return std::abs(k.fourier_coeff(j) - ks.fourier_coeff(j)) * j * j; };
    double a = 0, b = 0;
    for (int j = 100; j < 110; ++j) a = std::max(a, krem(j));
    for (int j = 200; j < 210; ++j) b = std::max(b, krem(j));
    CHECK(b / a == doctest::Approx(1.0).epsilon(0.2));
}

TEST_CASE("from_occupation: decoupled limit reproduces the step") {
    auto spec = small_alpha();
    spec.coupling = 0.0;
    auto s = OccupationSymbol::from_occupation(spec, 32);
    auto st = OccupationSymbol::from_step(fermi_momentum(spec));
    CHECK(s.f_in() == 1.0);
    for (int j = 0; j < 60; ++j) CHECK(std::abs(s.fourier_coeff(j) - st.fourier_coeff(j)) < 1e-13);
}

TEST_CASE("from_occupation: jump value and grid convergence") {
    auto spec = small_alpha();
    auto s = OccupationSymbol::from_occupation(spec, 48);
    double pf = fermi_momentum(spec);
    CHECK(s.fermi_momentum() == pf);
    auto sol = dispersion_roots(spec, pf * (1 - 1e-12));
    CHECK(std::abs(s.f_in() - (2 * sol.weights[0] - 1)) < 1e-9);
    CHECK(s.f_in() < 1.0);
    auto s2 = OccupationSymbol::from_occupation(spec, 96);
    double worst = 0;
    for (int j = 0; j < 200; ++j) worst = std::max(worst, std::abs(s.fourier_coeff(j) - s2.fourier_coeff(j)));
    CHECK(worst < 1e-10);
    auto g = tu::rng(25);
    for (int i = 0; i < 50; ++i) {
        double p = tu::uniform(g, 0.0, pf);
        CHECK(std::abs(s(p) - (2 * occupation(spec, p, FermiEdge::Below) - 1)) < 1e-10);
    }
}

TEST_CASE("from_occupation refuses several jump pairs") {
    auto spec = small_alpha();
    spec.band_bottom = 0.4;
    CHECK_THROWS(OccupationSymbol::from_occupation(spec, 32));
}

TEST_CASE("property: coefficients real, even, bounded symbol") {
    auto g = tu::rng(23);
    for (int t = 0; t < 10; ++t) {
        auto s = tu::random_smooth_symbol(g);
        for (int j = 0; j < 30; ++j) CHECK(s.fourier_coeff(j) == s.fourier_coeff(-j));
        for (int i = 0; i < 100; ++i) {
            double p = tu::uniform(g, -pi, pi);
            CHECK(s(p) == s(-p));
            CHECK(std::abs(s(p)) <= 1.0);
        }
        CHECK(s(s.fermi_momentum() + 1e-9) == -1.0);
    }
}

TEST_CASE("JSON round trip") {
    auto g = tu::rng(24);
    auto s = tu::random_smooth_symbol(g);
    auto r = OccupationSymbol::from_json(nlohmann::json::parse(s.to_json().dump()));
    CHECK(r.fermi_momentum() == s.fermi_momentum());
    for (int i = 0; i < 20; ++i) {
        double p = tu::uniform(g, -pi, pi);
        CHECK(std::abs(r(p) - s(p)) <= 1e-15 * std::abs(s(p)));
    }
    auto st = OccupationSymbol::from_json(OccupationSymbol::from_step(0.7).to_json());
    CHECK(st.fourier_coeff(3) == OccupationSymbol::from_step(0.7).fourier_coeff(3));
    CHECK_THROWS_AS(OccupationSymbol::from_json(nlohmann::json{{"representation", "weird"}, {"p_F", 1.0}, {"jump_values", {1, -1}}}), ConfigError);
}

TEST_CASE("theta(f) inversion") {
    const double pf = 1.4;
    auto s = OccupationSymbol::from_profile(pf, 48, [](double p) { return 0.9 - 0.2 * p * p; });
    for (double p : {0.2, 0.7, 1.3}) {
        auto th = s.theta_of(0.9 - 0.2 * p * p);
        REQUIRE(th.size() == 1);
        CHECK(std::abs(th[0] - p) < 1e-12);
    }
    CHECK(s.theta_of(0.95).empty());
    auto w = OccupationSymbol::from_profile(pf, 48, [](double p) { return 0.5 + 0.2 * std::cos(5 * p); });
    CHECK(!w.inside_monotone());
    CHECK_THROWS_AS(w.theta_of(0.5), NumericalError);
    CHECK(w.theta_of(0.5, true).size() >= 2);
}
