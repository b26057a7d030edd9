#include "ffspec/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>

namespace ffspec {

namespace {

using GL20 = boost::math::quadrature::gauss<double, 20>;

void add_panel(QuadRule& r, double a, double b) {
    const auto& xs = GL20::abscissa();
    const auto& ws = GL20::weights();
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        r.x.push_back(c + h * xs[i]);
        r.w.push_back(h * ws[i]);
        if (xs[i] != 0.0) {
            r.x.push_back(c - h * xs[i]);
            r.w.push_back(h * ws[i]);
        }
    }
}

}  // namespace

QuadRule gauss_panels(double a, double b, int panels) {
    QuadRule r;
    double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) add_panel(r, a + p * h, p + 1 == panels ? b : a + (p + 1) * h);
    return r;
}

QuadRule gauss_graded(double a, double b, int levels, bool toward_a) {
    QuadRule r;
    const double q = 0.15;
    double len = b - a;
    // breakpoints measured from the singular end
    std::vector<double> t{0.0};
    double s = len;
    for (int i = 0; i < levels; ++i) s *= q;
    t.push_back(s);
    while (t.back() < len) {
        double nxt = t.back() / q;
        t.push_back(nxt >= len * 0.999 ? len : nxt);
    }
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        if (toward_a)
            add_panel(r, a + t[i], a + t[i + 1]);
        else
            add_panel(r, b - t[i + 1], b - t[i]);
    }
    return r;
}

void append_rule(QuadRule& acc, const QuadRule& r) {
    acc.x.insert(acc.x.end(), r.x.begin(), r.x.end());
    acc.w.insert(acc.w.end(), r.w.begin(), r.w.end());
}

}  // namespace ffspec
