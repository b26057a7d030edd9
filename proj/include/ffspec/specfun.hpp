#pragma once

#include <utility>

#include "ffspec/common.hpp"

namespace ffspec {

// A point on the Riemann surface of log: principal value plus winding count.
struct BranchedComplex {
    cplx value{};
    int sheet = 0;

    static BranchedComplex principal(cplx z) { return {z, 0}; }
    static BranchedComplex polar(double r, double arg);

    double arg() const;
    cplx log() const;
    cplx pow(cplx a) const;
    BranchedComplex rotated(double angle) const;  // multiply by e^{i angle} continuously
    BranchedComplex scaled(double s) const;       // s > 0
};

cplx log_gamma(cplx z);
cplx gamma_fn(cplx z);
cplx rgamma(cplx z);  // 1/Gamma, entire
cplx digamma(cplx z);

// M(a,1,w), principal (entire in w).
cplx kummer_m1(cplx a, cplx w);

// U(a,1,zeta) on the sheet recorded in zeta.
cplx tricomi_u(cplx a, const BranchedComplex& zeta);

// Gamma(0,zeta) on the recorded sheet.
cplx incomplete_gamma0(const BranchedComplex& zeta);

struct QP {
    cplx q;
    cplx p;
};
QP pq_functions(int i, cplx alpha, const BranchedComplex& zeta);

namespace detail {
// Regime-forced evaluations of the principal U, for the overlap test.
cplx tricomi_u_series(cplx a, cplx w);
cplx tricomi_u_asymptotic(cplx a, cplx w, double* err_est = nullptr);
double tricomi_crossover();
}  // namespace detail

}  // namespace ffspec
