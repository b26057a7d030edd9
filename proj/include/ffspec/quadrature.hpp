#pragma once

#include <vector>

namespace ffspec {

struct QuadRule {
    std::vector<double> x;
    std::vector<double> w;
};

// Composite Gauss-Legendre on [a,b] with `panels` equal panels of 20 nodes.
QuadRule gauss_panels(double a, double b, int panels);

// Panels shrinking geometrically toward `a` (ratio 0.15), for log-type endpoint behaviour.
QuadRule gauss_graded(double a, double b, int levels, bool toward_a = true);

// Append rule r to acc.
void append_rule(QuadRule& acc, const QuadRule& r);

}  // namespace ffspec
