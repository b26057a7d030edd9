#include "ffspec/specfun.hpp"

#include <quadmath.h>

#include <array>
#include <cmath>

namespace ffspec {

namespace {

using qreal = __float128;
using qcplx = __complex128;

constexpr double kCrossover = 30.0;
constexpr double kSeriesLimit = 60.0;
const qreal kEulerQ = strtoflt128("0.5772156649015328606065120900824024310", nullptr);

// B_{2n}, n = 1..17, as exact numerator/denominator pairs.
constexpr std::array<std::array<double, 2>, 17> kBernoulli{{
    {1.0, 6.0},
    {-1.0, 30.0},
    {1.0, 42.0},
    {-1.0, 30.0},
    {5.0, 66.0},
    {-691.0, 2730.0},
    {7.0, 6.0},
    {-3617.0, 510.0},
    {43867.0, 798.0},
    {-174611.0, 330.0},
    {854513.0, 138.0},
    {-236364091.0, 2730.0},
    {8553103.0, 6.0},
    {-23749461029.0, 870.0},
    {8615841276005.0, 14322.0},
    {-7709321041217.0, 510.0},
    {2577687858367.0, 6.0},
}};

qcplx to_q(cplx z) {
    qcplx q;
    __real__ q = z.real();
    __imag__ q = z.imag();
    return q;
}

cplx from_q(qcplx q) { return {static_cast<double>(__real__ q), static_cast<double>(__imag__ q)}; }

qreal qabs(qcplx z) { return cabsq(z); }

qcplx qdigamma(qcplx z) {
    qcplx acc = 0;
    while (qabs(z) < 30) {
        acc -= 1 / z;
        z += 1;
    }
    qcplx inv2 = 1 / (z * z);
    qcplx pw = inv2;
    qcplx s = clogq(z) - 1 / (2 * z);
    for (std::size_t n = 0; n < kBernoulli.size(); ++n) {
        qreal b = static_cast<qreal>(kBernoulli[n][0]) / static_cast<qreal>(kBernoulli[n][1]);
        s -= b / (2 * static_cast<qreal>(n + 1)) * pw;
        pw *= inv2;
    }
    return s + acc;
}

bool nonpositive_integer(cplx a, int* n) {
    double r = std::round(a.real());
    if (a.imag() == 0.0 && a.real() == r && r <= 0.0) {
        if (n) *n = static_cast<int>(-r);
        return true;
    }
    return false;
}

// (-1)^n n! L_n(w)
cplx laguerre_u(int n, cplx w) {
    cplx sum = 0.0, term = 1.0;  // C(n,j)(-w)^j/j!
    for (int j = 0; j <= n; ++j) {
        sum += term;
        term *= -w * static_cast<double>(n - j) / static_cast<double>((j + 1) * (j + 1));
    }
    double fact = 1.0;
    for (int j = 2; j <= n; ++j) fact *= j;
    return (n % 2 ? -fact : fact) * sum;
}

// Returns the pair (M, bracket) with U = -rgamma(a) * bracket.
void log_series(cplx a, cplx w, cplx* m_out, cplx* bracket_out) {
    qcplx A = to_q(a), W = to_q(w);
    qcplx lw = clogq(W);
    qcplx psiak = qdigamma(A);
    qreal harm = 0;
    qcplx term = 1, s1 = 0, s2 = 0;
    qreal biggest = 0;
    const double kmin = std::abs(w) + std::abs(a) + 2.0;
    for (int k = 0; k < 4000; ++k) {
        qcplx psi2 = psiak - 2 * (harm - kEulerQ);
        s1 += term;
        s2 += term * psi2;
        qreal mag = qabs(term) * (1 + qabs(psi2) + qabs(lw));
        if (mag > biggest) biggest = mag;
        if (k > kmin && mag < static_cast<qreal>(1e-36) * biggest) break;
        qreal kq = k;
        term *= (A + kq) * W / ((kq + 1) * (kq + 1));
        psiak += 1 / (A + kq);
        harm += 1 / (kq + 1);
    }
    if (m_out) *m_out = from_q(s1);
    if (bracket_out) *bracket_out = from_q(s1 * lw + s2);
}

cplx u_principal(cplx a, cplx w) {
    double r = std::abs(w);
    if (r == 0.0) throw NumericalError("specfun", "U(a,1,0) is logarithmically singular");
    if (r < kCrossover) return detail::tricomi_u_series(a, w);
    double err = 0.0;
    cplx v = detail::tricomi_u_asymptotic(a, w, &err);
    if (err <= 1e-13 * std::abs(v)) return v;
    if (r < kSeriesLimit) return detail::tricomi_u_series(a, w);
    throw NumericalError("specfun", "U(a,1,w): asymptotic series did not reach tolerance and |w| is beyond the series range");
}

}  // namespace

BranchedComplex BranchedComplex::polar(double r, double arg) {
    cplx v = std::polar(r, arg);
    int s = static_cast<int>(std::lround((arg - std::arg(v)) / (2.0 * pi)));
    return {v, s};
}

double BranchedComplex::arg() const { return std::arg(value) + 2.0 * pi * sheet; }

cplx BranchedComplex::log() const { return {std::log(std::abs(value)), arg()}; }

cplx BranchedComplex::pow(cplx a) const { return std::exp(a * log()); }

BranchedComplex BranchedComplex::rotated(double angle) const { return polar(std::abs(value), arg() + angle); }

BranchedComplex BranchedComplex::scaled(double s) const { return polar(s * std::abs(value), arg()); }

cplx log_gamma(cplx z) {
    int n;
    if (nonpositive_integer(z, &n)) throw NumericalError("specfun", "log_gamma at a pole");
    if (z.real() < -20.0) {
        // reflection
        return std::log(pi) - std::log(std::sin(pi * z)) - log_gamma(1.0 - z);
    }
    cplx shift = 0.0;
    while (z.real() < 15.0) {
        shift += std::log(z);
        z += 1.0;
    }
    cplx inv = 1.0 / z, inv2 = inv * inv;
    cplx s = (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * pi);
    cplx pw = inv;
    for (int k = 0; k < 8; ++k) {
        double b = kBernoulli[k][0] / kBernoulli[k][1];
        double nn = 2.0 * (k + 1);
        s += b / (nn * (nn - 1.0)) * pw;
        pw *= inv2;
    }
    return s - shift;
}

cplx gamma_fn(cplx z) { return std::exp(log_gamma(z)); }

cplx rgamma(cplx z) {
    if (nonpositive_integer(z, nullptr)) return 0.0;
    if (z.real() < 0.5) return std::sin(pi * z) / pi * std::exp(log_gamma(1.0 - z));
    return std::exp(-log_gamma(z));
}

cplx digamma(cplx z) {
    if (nonpositive_integer(z, nullptr)) throw NumericalError("specfun", "digamma at a pole");
    if (z.real() < -20.0) return digamma(1.0 - z) - pi / std::tan(pi * z);
    cplx acc = 0.0;
    while (z.real() < 15.0) {
        acc -= 1.0 / z;
        z += 1.0;
    }
    cplx inv2 = 1.0 / (z * z), pw = inv2;
    cplx s = std::log(z) - 0.5 / z;
    for (int k = 0; k < 8; ++k) {
        s -= kBernoulli[k][0] / kBernoulli[k][1] / (2.0 * (k + 1)) * pw;
        pw *= inv2;
    }
    return s + acc;
}

namespace detail {

double tricomi_crossover() { return kCrossover; }

cplx tricomi_u_series(cplx a, cplx w) {
    int n;
    if (nonpositive_integer(a, &n)) return laguerre_u(n, w);
    cplx br;
    log_series(a, w, nullptr, &br);
    return -rgamma(a) * br;
}

cplx tricomi_u_asymptotic(cplx a, cplx w, double* err_est) {
    cplx sum = 0.0, term = 1.0;
    double err = 0.0;
    for (int k = 0; k < 400; ++k) {
        sum += term;
        cplx next = -term * (a + double(k)) * (a + double(k)) / (double(k + 1) * w);
        err = std::abs(next);
        if (err == 0.0 || err < 1e-17 * std::abs(sum)) break;
        if (err >= std::abs(term) && k > 0) break;
        term = next;
    }
    cplx pre = std::exp(-a * std::log(w));
    if (err_est) *err_est = err * std::abs(pre);
    return pre * sum;
}

}  // namespace detail

cplx kummer_m1(cplx a, cplx w) {
    if (std::abs(w) < kCrossover) {
        cplx m;
        log_series(a, w, &m, nullptr);
        return m;
    }
    if (w.real() < 0.0) return std::exp(w) * kummer_m1(1.0 - a, -w);
    // connection through U at w and e^{-i pi sgn} w
    double sg = w.imag() >= 0.0 ? 1.0 : -1.0;
    cplx rot = -w;  // e^{-i pi sg} w, principal since Re w >= 0
    cplx t1 = std::exp(I * pi * sg * a) * rgamma(1.0 - a) * u_principal(a, w);
    cplx t2 = std::exp(-I * pi * sg * (1.0 - a)) * rgamma(a) * std::exp(w) * u_principal(1.0 - a, rot);
    return t1 + t2;
}

cplx tricomi_u(cplx a, const BranchedComplex& zeta) {
    int n;
    if (nonpositive_integer(a, &n)) return laguerre_u(n, zeta.value);
    cplx u = u_principal(a, zeta.value);
    if (zeta.sheet != 0) u -= 2.0 * pi * I * double(zeta.sheet) * rgamma(a) * kummer_m1(a, zeta.value);
    return u;
}

cplx incomplete_gamma0(const BranchedComplex& zeta) {
    cplx z = zeta.value;
    double r = std::abs(z);
    if (r == 0.0) throw NumericalError("specfun", "Gamma(0,z) is singular at z = 0");
    cplx g;
    if (r <= kCrossover || z.real() <= 0.0) {
        qcplx Z = to_q(z);
        qcplx term = -Z, s = 0;
        for (int k = 1; k < 20000; ++k) {
            qcplx add = term / static_cast<qreal>(k);
            s += add;
            if (k > r && qabs(add) < static_cast<qreal>(1e-34) * qabs(s)) break;
            term *= -Z / static_cast<qreal>(k + 1);
        }
        g = from_q(-kEulerQ - clogq(Z) - s);
    } else {
        cplx sum = 0.0, term = 1.0;
        for (int k = 0; k < 400; ++k) {
            sum += term;
            cplx next = -term * double(k + 1) / z;
            if (std::abs(next) < 1e-17 * std::abs(sum) || std::abs(next) >= std::abs(term)) break;
            term = next;
        }
        g = std::exp(-z) / z * sum;
    }
    return g - 2.0 * pi * I * double(zeta.sheet);
}

QP pq_functions(int i, cplx alpha, const BranchedComplex& zeta) {
    if (i != 0 && i != 1) throw ConfigError("pq_functions: index must be 0 or 1");
    if (std::abs(std::sin(pi * alpha)) < 1e-300) throw NumericalError("specfun", "pq_functions: integer alpha");
    BranchedComplex w = zeta.rotated(-pi);
    cplx a = double(i) - alpha;
    cplx u1 = tricomi_u(a, w);
    cplx e2 = std::exp(2.0 * pi * I * alpha);
    cplx pref = gamma_fn(alpha + 1.0 - double(i)) * rgamma(a);
    cplx q = -e2 * u1 + pref * e2 * std::exp(-zeta.value) * tricomi_u(1.0 - double(i) + alpha, zeta);
    cplx p = std::exp(pi * I * alpha) * u1;
    return {q, p};
}

}  // namespace ffspec
