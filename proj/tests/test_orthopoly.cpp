#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ffspec/orthopoly.hpp"
#include "test_util.hpp"

using namespace ffspec;
using tu::rel;

TEST_CASE("1x1 ladder") {
    Eigen::MatrixXcd m(1, 1);
    m(0, 0) = 0.37;
    auto lad = chi_ladder(m, cplx(0.2, 1.0));
    REQUIRE(lad.etas.size() == 1);
    CHECK(std::abs(lad.etas[0] - cplx(0.57, 1.0)) < 1e-15);
}

TEST_CASE("ladder product equals the determinant") {
    auto g = tu::rng(41);
    for (int t = 0; t < 40; ++t) {
        auto s = t % 2 ? tu::random_smooth_symbol(g) : OccupationSymbol::from_step(tu::uniform(g, 0.3, 2.8));
        int k = t % 6, l = 10 - k - t % 5;
        Geometry geo{k, l, k + 1 + t % 7};
        Kind kind = t % 3 ? Kind::Negativity : Kind::Plain;
        auto cov = build_covariance(s, geo, kind);
        cplx lam = tu::ucplx(g, -1.5, 1.5) + cplx(0, 0.2);
        CHECK(rel(chi_ladder(cov, lam).product(), char_poly(cov, lam)) < 1e-8);
    }
}

TEST_CASE("eta independence of the matrix size") {
    auto g = tu::rng(42);
    for (int t = 0; t < 20; ++t) {
        auto s = tu::random_smooth_symbol(g);
        Geometry small{3, 2 + t % 3, 8}, big{small.k, small.l + 4, small.n};
        Kind kind = t % 2 ? Kind::Negativity : Kind::Plain;
        cplx lam = tu::ucplx(g, -1.0, 1.0) + cplx(0, 0.5);
        auto a = chi_ladder(build_covariance(s, small, kind), lam).etas;
        auto b = chi_ladder(build_covariance(s, big, kind), lam).etas;
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-10 * std::abs(a[i]));
    }
}

TEST_CASE("det_ratio small case and large lambda") {
    auto s = OccupationSymbol::from_step(1.1);
    double f0 = s.fourier_coeff(0), fn = s.fourier_coeff(3);
    for (Kind kind : {Kind::Plain, Kind::Negativity}) {
        cplx lam(0.4, 0.7), t2 = tau2_of(kind);
        cplx expect = ((lam + f0) * (lam + t2 * f0) - t2 * fn * fn) / (lam + f0);
        CHECK(rel(det_ratio(s, {0, 0, 3}, lam, kind, Growth::GrowL), expect) < 1e-14);
        cplx big(1e7, 3e6);
        CHECK(rel(det_ratio(s, {3, 3, 8}, big, kind, Growth::GrowL), big) < 1e-6);
        CHECK(rel(det_ratio(s, {3, 3, 8}, big, kind, Growth::GrowK), big) < 1e-6);
    }
}

TEST_CASE("det_ratio against determinant quotients") {
    auto g = tu::rng(43);
    for (int t = 0; t < 30; ++t) {
        auto s = t % 2 ? tu::random_smooth_symbol(g) : OccupationSymbol::from_step(tu::uniform(g, 0.3, 2.8));
        int k = 1 + t % 5, l = 1 + (t / 2) % 5;
        Geometry geo{k, l, k + 1 + t % 6};
        Kind kind = t % 3 ? Kind::Negativity : Kind::Plain;
        cplx lam = tu::ucplx(g, -1.5, 1.5) + cplx(0, 0.3);
        cplx d = char_poly(build_covariance(s, geo, kind), lam);
        cplx dl = char_poly(build_covariance(s, {k, l - 1, geo.n}, kind), lam);
        cplx dk = char_poly(build_covariance(s, {k - 1, l, geo.n}, kind), lam);
        CHECK(rel(det_ratio(s, geo, lam, kind, Growth::GrowL), d / dl) < 1e-8);
        CHECK(rel(det_ratio(s, geo, lam, kind, Growth::GrowK), d / dk) < 1e-8);
    }
}

TEST_CASE("telescoping over four steps") {
    auto s = OccupationSymbol::from_step(1.3);
    Geometry geo{3, 5, 7};
    for (Kind kind : {Kind::Plain, Kind::Negativity}) {
        cplx lam(0.3, 0.9), prod = 1.0;
        for (int i = 0; i < 4; ++i) prod *= det_ratio(s, {geo.k, geo.l - i, geo.n}, lam, kind, Growth::GrowL);
        cplx d = char_poly(build_covariance(s, geo, kind), lam);
        cplx d0 = char_poly(build_covariance(s, {geo.k, geo.l - 4, geo.n}, kind), lam);
        CHECK(rel(prod, d / d0) < 1e-7);
    }
}

TEST_CASE("singular minor is reported") {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(3, 3);
    m(1, 1) = 0.0;
    CHECK_THROWS_AS(chi_ladder(m, 0.0), NumericalError);
}

TEST_CASE("smallest ortho_poly system") {
    auto s = OccupationSymbol::from_step(0.8);
    auto cov = build_covariance(s, {0, 0, 2}, Kind::Plain);
    cplx lam(0.1, 0.6);
    auto p = ortho_poly(cov, lam, {2, true});
    CHECK(p.psi2[0] == cplx(1.0));
    cplx f0 = s.fourier_coeff(0), f2 = s.fourier_coeff(2);
    CHECK(rel(p.psi1[0], -f2 / (lam + f0)) < 1e-14);
    CHECK(rel(p.chi, det_ratio(s, {0, 0, 2}, lam, Kind::Plain, Growth::GrowL)) < 1e-13);
}

TEST_CASE("ortho_poly families: normalization and moments") {
    auto g = tu::rng(44);
    for (int t = 0; t < 16; ++t) {
        auto s = t % 2 ? tu::random_smooth_symbol(g) : OccupationSymbol::from_step(tu::uniform(g, 0.4, 2.6));
        Geometry geo{1 + t % 4, 1 + (t / 4) % 4, 6 + t % 3};
        Kind kind = t % 3 ? Kind::Negativity : Kind::Plain;
        cplx lam = tu::ucplx(g, -1.2, 1.2) + cplx(0, 0.4);
        auto cov = build_covariance(s, geo, kind);
        auto coeffs = s.fourier_coeffs(geo.max_lag() + 2);
        for (int sigma : {1, 2})
            for (bool plus : {true, false}) {
                auto p = ortho_poly(cov, lam, {sigma, plus});
                int msig = sigma == 1 ? geo.k : geo.l;
                if (plus) {
                    CHECK((sigma == 1 ? p.psi1[msig] : p.psi2[msig]) == cplx(1.0));
                } else {
                    cplx v = sigma == 1 ? p.eval1(0.0) : p.eval2(0.0);
                    CHECK(std::abs(v * p.chi - 1.0) < 1e-14);
                }
                for (int sp : {1, 2}) {
                    int top = sp == 1 ? geo.k : geo.l;
                    for (int j = 0; j <= top; ++j) {
                        cplx target = 0.0;
                        if (sp == sigma && plus && j == msig) target = p.chi;
                        if (sp == sigma && !plus && j == 0) target = 1.0;
                        cplx mq = moment_quadrature(s, p, sp, j, lam, kind);
                        CHECK(std::abs(mq - target) < 1e-9 * (1 + std::abs(target)));
                        CHECK(std::abs(moment(coeffs, p, sp, j, lam, kind) - target) < 1e-11 * (1 + std::abs(target)));
                    }
                }
            }
        auto ch = chi_families(coeffs, geo, lam, kind);
        CHECK(rel(ortho_poly(cov, lam, {1, true}).chi, ch.chi1p) < 1e-9);
        CHECK(rel(ortho_poly(cov, lam, {2, true}).chi, ch.chi2p) < 1e-9);
        CHECK(rel(ortho_poly(cov, lam, {1, false}).chi, ch.chi1m) < 1e-9);
        CHECK(rel(ortho_poly(cov, lam, {2, false}).chi, ch.chi2m) < 1e-9);
    }
}

TEST_CASE("T(0) identities") {
    auto s = OccupationSymbol::from_step(pi / 2);
    for (Kind kind : {Kind::Plain, Kind::Negativity}) {
        auto r = t_matrix_check(s, {1, 1, 3}, cplx(0, 2), kind);
        CHECK(r.max_residual() <= 1e-8);
    }
    auto g = tu::rng(45);
    for (int t = 0; t < 6; ++t) {
        auto sm = tu::random_smooth_symbol(g);
        auto r = t_matrix_check(sm, {2, 2, 5 + t}, tu::ucplx(g, -1, 1) + cplx(0, 0.5), t % 2 ? Kind::Negativity : Kind::Plain);
        CHECK(r.max_residual() <= 1e-7);
    }
    auto one = OccupationSymbol::constant(1.0);
    auto r = t_matrix_check(one, {2, 2, 5}, cplx(0.5, 0.5), Kind::Plain);
    CHECK(r.max_residual() < 1e-14);
    CHECK(rel(r.t14, cplx(1.5, 0.5)) < 1e-14);
}
