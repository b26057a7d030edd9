#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ffspec/observables.hpp"
#include "ffspec/quadrature.hpp"
#include "test_util.hpp"

using namespace ffspec;
using tu::rel;

TEST_CASE("contour quadrature: residue and analyticity") {
    auto circ = circle_contour(4.0, 64);
    auto bone = dogbone_contour(4.0, 0);
    for (const auto* c : {&circ, &bone}) {
        cplx r = contour_quadrature([](cplx z, int) { return 1.0 / z; }, *c);
        CHECK(std::abs(r - 2.0 * pi * I) < 1e-12);
        cplx p = contour_quadrature([](cplx z, int) { return 3.0 - z + 0.5 * z * z * z; }, *c);
        CHECK(std::abs(p) < 1e-10);
        // shifted pole inside
        cplx s = contour_quadrature([](cplx z, int) { return 1.0 / (z - cplx(0.3, 0.2)); }, *c);
        CHECK(std::abs(s - 2.0 * pi * I) < 1e-10);
    }
}

TEST_CASE("contour quadrature: OpenMP equals serial") {
    auto bone = dogbone_contour(4.0, 1);
    ContourFn fn = [](cplx z, int bank) { return entropy_kernel(z, bank) / (z * z + 0.25); };
    CHECK(contour_quadrature(fn, bone) == contour_quadrature_serial(fn, bone));
}

TEST_CASE("entropy kernel: symmetry, value at 0, slit jumps") {
    auto g = tu::rng(21);
    for (int t = 0; t < 100; ++t) {
        cplx z = tu::ucplx(g, -3, 3);
        CHECK(std::abs(entropy_kernel(z) - entropy_kernel(-z)) < 1e-13);
    }
    CHECK(std::abs(entropy_kernel(0.0) - std::log(2.0)) < 1e-15);
    CHECK(std::abs(entropy_kernel(1.0)) == 0.0);
    CHECK(std::abs(entropy_kernel(0.4) - binary_entropy(0.7)) < 1e-15);
    for (double x : {1.5, 2.0, 3.7}) {
        CHECK(std::abs(entropy_kernel(x, 1) - entropy_kernel(x, -1) - pi * I * (1.0 - x)) < 1e-13);
        CHECK(std::abs(entropy_kernel(-x, 1) - entropy_kernel(-x, -1) + pi * I * (1.0 - x)) < 1e-13);
        // banks agree with the limits from off the axis
        CHECK(std::abs(entropy_kernel(x, 1) - entropy_kernel(cplx(x, 1e-12))) < 1e-9);
        CHECK(std::abs(entropy_kernel(-x, -1) - entropy_kernel(cplx(-x, -1e-12))) < 1e-9);
    }
}

TEST_CASE("dogbone integral of the entropy kernel vs direct real-axis integration") {
    // rho(x) = 3/4 (1 - x^2) on [-1, 1], Stieltjes transform in closed form
    auto S = [](cplx z) { return 0.75 * ((1.0 - z * z) * std::log((z + 1.0) / (z - 1.0)) + 2.0 * z); };
    cplx via_contour = contour_quadrature([&](cplx z, int bank) { return entropy_kernel(z, bank) * S(z); },
                                          dogbone_contour(4.0, 1)) /
                       (2.0 * pi * I);
    QuadRule r = gauss_graded(-1.0, 0.0, 12, true);
    append_rule(r, gauss_graded(0.0, 1.0, 12, false));
    double direct = 0.0;
    for (std::size_t q = 0; q < r.x.size(); ++q)
        direct += r.w[q] * binary_entropy(0.5 * (1.0 + r.x[q])) * 0.75 * (1.0 - r.x[q] * r.x[q]);
    CHECK(std::abs(via_contour - direct) < 1e-6);
    CHECK(std::abs(via_contour.imag()) < 1e-9);
}

TEST_CASE("entropy change: pure state and constant symbols") {
    Geometry geo{8, 8, 64};
    auto one = OccupationSymbol::constant(1.0);
    auto e = entropy_change(one, geo, Kind::Plain, Growth::GrowL);
    CHECK(e.total() == 0.0);
    CHECK(std::abs(exact_entropy_change(one, geo, Growth::GrowL)) < 1e-10);
    CHECK_THROWS_AS(entropy_change(one, geo, Kind::Negativity, Growth::GrowL), ConfigError);
}

TEST_CASE("entropy change: step symbol against exact differences, improving with doubling") {
    auto sym = OccupationSymbol::from_step(pi / 2);
    Geometry g1{16, 16, 128}, g2{32, 32, 256};
    auto a1 = entropy_change(sym, g1, Kind::Plain, Growth::GrowL);
    auto a2 = entropy_change(sym, g2, Kind::Plain, Growth::GrowL);
    double x1 = exact_entropy_change(sym, g1, Growth::GrowL), x2 = exact_entropy_change(sym, g2, Growth::GrowL);
    CHECK(a1.counting == 0.0);
    double e1 = rel(a1.total(), x1), e2 = rel(a2.total(), x2);
    CAPTURE(e1);
    CAPTURE(e2);
    CHECK(e1 <= 0.10);
    CHECK(e2 < e1);
    // growth at the inner end of A: the same kernel with R11
    auto k1 = entropy_change(sym, g1, Kind::Plain, Growth::GrowK);
    double xk = exact_entropy_change(sym, g1, Growth::GrowK);
    CAPTURE(k1.total());
    CAPTURE(xk);
    CHECK(rel(k1.total(), xk) <= 0.10);
}

TEST_CASE("entropy change: error shrinks by at least 1.5x per doubling") {
    auto sym = OccupationSymbol::from_step(pi / 2);
    double prev = 0.0;
    for (int l : {16, 32, 64}) {
        Geometry g{l, l, 8 * l};
        double e = rel(entropy_change(sym, g, Kind::Plain, Growth::GrowL).total(), exact_entropy_change(sym, g, Growth::GrowL));
        CAPTURE(l);
        CAPTURE(e);
        if (prev > 0.0) CHECK(prev / e >= 1.5);
        prev = e;
    }
}

TEST_CASE("entropy change: contour route agrees with the real-axis density") {
    auto sym = OccupationSymbol::from_step(pi / 2);
    Geometry g{16, 16, 128};
    QuadRule r = gauss_graded(-1.0, 0.0, 14, true);
    append_rule(r, gauss_graded(0.0, 1.0, 14, false));
    auto d = spectral_density_change(sym, g, r.x, Kind::Plain, Growth::GrowL);
    double s = 0.0;
    for (std::size_t q = 0; q < r.x.size(); ++q) s += r.w[q] * binary_entropy(0.5 * (1.0 + r.x[q])) * d.samples[q].total();
    CHECK(rel(s, entropy_change(sym, g, Kind::Plain, Growth::GrowL).total()) < 2e-3);
}

TEST_CASE("entropy change: OpenMP equals serial") {
    auto sym = OccupationSymbol::from_step(1.1);
    Geometry geo{6, 5, 60};
    auto a = entropy_change(sym, geo, Kind::Plain, Growth::GrowL);
    auto b = entropy_change_serial(sym, geo, Kind::Plain, Growth::GrowL);
    CHECK(a.total() == b.total());
}

TEST_CASE("single interval entropy grows like (1/3) ln L") {
    auto sym = OccupationSymbol::from_step(pi / 2);
    double d = single_interval_entropy(sym, 64) - single_interval_entropy(sym, 32);
    CHECK(std::abs(d / (std::log(2.0) / 3.0) - 1.0) < 0.1);
}

TEST_CASE("negativity: positive when adjacent, decaying with separation, mirror invariant") {
    auto sym = OccupationSymbol::from_step(pi / 2);
    double prev = negativity_exact(sym, {8, 8, 9});
    CHECK(prev > 0.1);
    for (int n : {10, 12, 16, 24, 40, 72}) {
        double e = negativity_exact(sym, {8, 8, n});
        CHECK(e >= -1e-12);
        CHECK(e <= prev + 1e-12);
        prev = e;
    }
    CHECK(prev < 1e-2);
    Geometry g{5, 9, 14};
    CHECK(std::abs(negativity_exact(sym, g) - negativity_exact(sym, g.mirrored())) < 1e-10);
}

TEST_CASE("Delta d omega: mass and low moments against eigenvalue sums") {
    auto sym = OccupationSymbol::from_step(pi / 2);
    Geometry geo{16, 16, 128};
    for (Kind kind : {Kind::Plain, Kind::Negativity}) {
        cplx mass = density_moment(sym, geo, kind, Growth::GrowL, 0);
        CHECK(std::abs(mass - 1.0) < 0.05);
        for (int q : {1, 2}) {
            cplx a = density_moment(sym, geo, kind, Growth::GrowL, q);
            cplx x = exact_moment_change(sym, geo, kind, Growth::GrowL, q);
            CAPTURE(q);
            CHECK(std::abs(a - x) / std::max(std::abs(x), 1.0) < 0.05);
        }
    }
    auto c = OccupationSymbol::constant(0.3);
    CHECK(std::abs(density_moment(c, geo, Kind::Plain, Growth::GrowK, 2) - 0.09) < 1e-15);
    CHECK(std::abs(exact_moment_change(c, {4, 4, 9}, Kind::Plain, Growth::GrowK, 2) - 0.09) < 1e-12);
}

TEST_CASE("observables CSV layout") {
    std::vector<ObservableRow> rows{{"delta_s", {16, 16, 128}, Kind::Plain, 0.5, 0.4}};
    auto csv = observables_csv(rows);
    CHECK(csv.rfind("quantity,geometry,kind,asymptotic_value,exact_value,rel_error\n", 0) == 0);
    CHECK(csv.find("delta_s,\"16,16,128\",plain,0.5,0.40000000000000002,0.24999999999999994") != std::string::npos);
}
