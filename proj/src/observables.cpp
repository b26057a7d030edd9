#include "ffspec/observables.hpp"

#include <cmath>
#include <sstream>

#include "ffspec/format.hpp"
#include "ffspec/quadrature.hpp"

namespace ffspec {

ContourSpec circle_contour(double radius, int nodes) {
    if (!(radius > 0.0) || nodes < 4) throw ConfigError("circle_contour: radius > 0 and nodes >= 4 required");
    ContourSpec c;
    c.radius = radius;
    const double h = 2.0 * pi / nodes;
    for (int j = 0; j < nodes; ++j) {
        cplx z = std::polar(radius, (j + 0.5) * h);
        c.nodes.push_back({z, I * z * h, 0});
    }
    return c;
}

ContourSpec dogbone_contour(double radius, int refine) {
    if (!(radius > 1.0)) throw ConfigError("dogbone_contour: radius must exceed 1");
    ContourSpec c;
    c.radius = radius;
    const int panels = 4 << refine;
    const int levels = 10 + 2 * refine;
    for (double lo : {0.0, pi}) {
        auto arc = gauss_panels(lo, lo + pi, panels);
        for (std::size_t q = 0; q < arc.x.size(); ++q) {
            cplx z = std::polar(radius, arc.x[q]);
            c.nodes.push_back({z, I * z * arc.w[q], 0});
        }
    }
    // upper bank runs left to right, lower bank right to left
    auto right = gauss_graded(1.0, radius, levels, true);
    auto left = gauss_graded(-radius, -1.0, levels, false);
    for (const auto* rule : {&right, &left}) {
        for (std::size_t q = 0; q < rule->x.size(); ++q) {
            c.nodes.push_back({rule->x[q], rule->w[q], +1});
            c.nodes.push_back({rule->x[q], -rule->w[q], -1});
        }
    }
    return c;
}

cplx contour_quadrature(const ContourFn& fn, const ContourSpec& c) {
    const int n = static_cast<int>(c.nodes.size());
    std::vector<cplx> vals(n);
    std::string err;
#pragma omp parallel for schedule(dynamic, 8)
    for (int i = 0; i < n; ++i) {
        try {
            vals[i] = c.nodes[i].weight * fn(c.nodes[i].lambda, c.nodes[i].bank);
        } catch (const std::exception& e) {
#pragma omp critical
            if (err.empty()) err = e.what();
        }
    }
    if (!err.empty()) throw NumericalError("observables", err);
    cplx s = 0.0;
    for (const cplx& v : vals) s += v;
    return s;
}

cplx contour_quadrature_serial(const ContourFn& fn, const ContourSpec& c) {
    cplx s = 0.0;
    for (const auto& nd : c.nodes) s += nd.weight * fn(nd.lambda, nd.bank);
    return s;
}

namespace {

// u log u, with the side of the negative axis fixed by s when Im u = 0
cplx xlogx(cplx u, int s) {
    if (u == cplx(0.0)) return 0.0;
    if (u.imag() == 0.0 && u.real() < 0.0 && s != 0) return u * cplx(std::log(-u.real()), s * pi);
    return u * std::log(u);
}

double f_out_of(const OccupationSymbol& sym) {
    return sym.representation() == OccupationSymbol::Representation::Constant ? sym.f_in() : sym.f_out();
}

double sigma2_of(Kind kind, Growth which) { return which == Growth::GrowL ? tau2_of(kind) : 1.0; }

// (1/pi) int_0^pi h(-sigma^2 f(p)) dp
template <class H>
cplx szego_mean(const OccupationSymbol& sym, double s2, H h) {
    double p_F = sym.fermi_momentum();
    cplx acc = (pi - p_F) * h(-s2 * f_out_of(sym));
    if (sym.representation() == OccupationSymbol::Representation::Sampled) {
        auto rule = gauss_panels(0.0, p_F, 8);
        for (std::size_t q = 0; q < rule.x.size(); ++q) acc += rule.w[q] * h(-s2 * sym.inside(rule.x[q]));
    } else {
        acc += p_F * h(-s2 * sym.f_in());
    }
    return acc / pi;
}

cplx log_r_derivative(const OccupationSymbol& sym, const Geometry& geo, cplx lambda, Kind kind, Growth which,
                      PhaseVariant variant) {
    double fo = f_out_of(sym), p_F = sym.fermi_momentum();
    cplx b = fh_beta(lambda, 1.0, sym.f_in(), fo), bt = fh_beta(lambda, tau2_of(kind), sym.f_in(), fo);
    ROutDiag r = r_out_diag(b, bt, p_F, geo.k, geo.l, geo.m(), variant);
    ROutDiag dr = r_out_diag_derivative(lambda, kind, sym.f_in(), fo, p_F, geo.k, geo.l, geo.m(), variant);
    return which == Growth::GrowL ? dr.r22 / r.r22 : dr.r11 / r.r11;
}

void check_small_beta(const OccupationSymbol& sym, cplx lambda, Kind kind) {
    double fo = f_out_of(sym);
    cplx b = fh_beta(lambda, 1.0, sym.f_in(), fo), bt = fh_beta(lambda, tau2_of(kind), sym.f_in(), fo);
    double worst = std::max(std::abs(b.real()), std::abs(bt.real()));
    if (!(worst < 0.1))
        throw NumericalError("observables", "Re beta = " + fmt_g(worst) + " >= 0.1 at contour node lambda = " +
                                                fmt_g(lambda.real()) + (lambda.imag() < 0 ? "" : "+") +
                                                fmt_g(lambda.imag()) + "i");
}

void check_geometry(const Geometry& geo) {
    geo.validate();
    if (geo.k < 1 || geo.l < 1) throw ConfigError("observables: k, l >= 1 required");
}

template <class Quad>
EntropyChange entropy_change_impl(const OccupationSymbol& sym, const Geometry& geo, Kind kind, Growth which,
                                  PhaseVariant variant, Quad quad) {
    check_geometry(geo);
    if (kind != Kind::Plain) throw ConfigError("entropy_change: plain kind only");
    EntropyChange out;
    double s2 = sigma2_of(kind, which);
    out.counting = szego_mean(sym, s2, [](double x) { return binary_entropy(0.5 * (1.0 + x)); }).real();
    if (!sym.has_jump()) return out;
    ContourFn fn = [&](cplx lam, int bank) {
        check_small_beta(sym, lam, kind);
        return entropy_kernel(lam, bank) * log_r_derivative(sym, geo, lam, kind, which, variant);
    };
    const double tol = 1e-6;
    const int max_refine = 4;
    double prev = (quad(fn, dogbone_contour(4.0, 0)) / (2.0 * pi * I)).real();
    for (int r = 1; r <= max_refine; ++r) {
        double cur = (quad(fn, dogbone_contour(4.0, r)) / (2.0 * pi * I)).real();
        if (std::abs(cur - prev) < tol) {
            out.correction = cur;
            out.refinements = r;
            return out;
        }
        prev = cur;
    }
    throw NumericalError("observables", "entropy contour integral did not stabilise to 1e-6");
}

}  // namespace

cplx entropy_kernel(cplx lambda, int bank) {
    cplx x = 0.5 * (1.0 + lambda), y = 0.5 * (1.0 - lambda);
    return -xlogx(x, bank) - xlogx(y, -bank);
}

EntropyChange entropy_change(const OccupationSymbol& sym, const Geometry& geo, Kind kind, Growth which,
                             PhaseVariant variant) {
    return entropy_change_impl(sym, geo, kind, which, variant,
                               [](const ContourFn& f, const ContourSpec& c) { return contour_quadrature(f, c); });
}

EntropyChange entropy_change_serial(const OccupationSymbol& sym, const Geometry& geo, Kind kind, Growth which,
                                    PhaseVariant variant) {
    return entropy_change_impl(sym, geo, kind, which, variant,
                               [](const ContourFn& f, const ContourSpec& c) { return contour_quadrature_serial(f, c); });
}

Geometry shrunk(const Geometry& geo, Growth which) {
    Geometry g = geo;
    if (which == Growth::GrowL)
        g.l -= 1;
    else
        g.k -= 1;
    return g;
}

double exact_entropy_change(const OccupationSymbol& sym, const Geometry& geo, Growth which) {
    check_geometry(geo);
    double a = spectrum(build_covariance(sym, geo, Kind::Plain)).entropy;
    double b = spectrum(build_covariance(sym, shrunk(geo, which), Kind::Plain)).entropy;
    return a - b;
}

double negativity_exact(const OccupationSymbol& sym, const Geometry& geo) {
    return spectrum(build_covariance(sym, geo, Kind::Negativity)).log_negativity;
}

cplx density_moment(const OccupationSymbol& sym, const Geometry& geo, Kind kind, Growth which, int q,
                    PhaseVariant variant) {
    check_geometry(geo);
    if (q < 0) throw ConfigError("density_moment: q >= 0 required");
    double s2 = sigma2_of(kind, which);
    cplx counting = szego_mean(sym, s2, [q](double x) { return std::pow(x, q); });
    if (!sym.has_jump()) return counting;
    ContourFn fn = [&](cplx lam, int) {
        return std::pow(lam, q) * log_r_derivative(sym, geo, lam, kind, which, variant);
    };
    cplx a = contour_quadrature(fn, circle_contour(4.0, 256));
    cplx b = contour_quadrature(fn, circle_contour(4.0, 512));
    if (std::abs(a - b) > 1e-10 * std::max(1.0, std::abs(b)))
        throw NumericalError("observables", "moment contour integral did not converge");
    return counting + b / (2.0 * pi * I);
}

cplx exact_moment_change(const OccupationSymbol& sym, const Geometry& geo, Kind kind, Growth which, int q) {
    check_geometry(geo);
    auto sum = [&](const Geometry& g) {
        cplx s = 0.0;
        for (const cplx& mu : spectrum(build_covariance(sym, g, kind)).eigenvalues) s += std::pow(-mu, q);
        return s;
    };
    return sum(geo) - sum(shrunk(geo, which));
}

double ObservableRow::rel_error() const {
    return std::abs(asymptotic - exact) / std::max(std::abs(exact), 1e-300);
}

std::string observables_csv(const std::vector<ObservableRow>& rows) {
    std::ostringstream os;
    os << "quantity,geometry,kind,asymptotic_value,exact_value,rel_error\n";
    for (const auto& r : rows)
        os << r.quantity << ",\"" << r.geo.str() << "\"," << kind_name(r.kind) << "," << fmt_g(r.asymptotic) << ","
           << fmt_g(r.exact) << "," << fmt_g(r.rel_error()) << "\n";
    return os.str();
}

}  // namespace ffspec
