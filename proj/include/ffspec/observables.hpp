#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ffspec/gaussian_core.hpp"
#include "ffspec/rh.hpp"
#include "ffspec/symbol.hpp"

namespace ffspec {

// bank = +1 / -1 on the upper / lower side of a real slit, 0 elsewhere.
struct ContourNode {
    cplx lambda;
    cplx weight;  // includes d lambda
    int bank = 0;
};

struct ContourSpec {
    std::vector<ContourNode> nodes;
    double radius = 4.0;
};

// Counter-clockwise circle |lambda| = radius, trapezoid rule.
ContourSpec circle_contour(double radius, int nodes);

// Boundary of the disk |lambda| < radius slit along [1, radius] and [-radius, -1]
// (the cuts of the entropy kernel). refine doubles the node counts.
ContourSpec dogbone_contour(double radius = 4.0, int refine = 0);

using ContourFn = std::function<cplx(cplx lambda, int bank)>;

cplx contour_quadrature(const ContourFn& fn, const ContourSpec& c);  // OpenMP
cplx contour_quadrature_serial(const ContourFn& fn, const ContourSpec& c);

// Binary entropy of (1 + lambda)/2 continued off the real segment; on a slit the
// bank selects the side.
cplx entropy_kernel(cplx lambda, int bank = 0);

struct EntropyChange {
    double counting = 0.0;    // residues of the Szego part
    double correction = 0.0;  // contour integral of H R'/R
    int refinements = 0;
    double total() const { return counting + correction; }
};

// Asymptotic S(k,l,n) - S(k,l-1,n) (GROW_L) or S(k,l,n) - S(k-1,l,n) (GROW_K). Plain kind.
EntropyChange entropy_change(const OccupationSymbol& sym, const Geometry& geo, Kind kind, Growth which,
                             PhaseVariant variant = PhaseVariant::PrintedR11);
EntropyChange entropy_change_serial(const OccupationSymbol& sym, const Geometry& geo, Kind kind, Growth which,
                                    PhaseVariant variant = PhaseVariant::PrintedR11);

double exact_entropy_change(const OccupationSymbol& sym, const Geometry& geo, Growth which);

double negativity_exact(const OccupationSymbol& sym, const Geometry& geo);

// (1/2 pi i) oint lambda^q d log(ratio): q = 0 is the mass of Delta d omega.
cplx density_moment(const OccupationSymbol& sym, const Geometry& geo, Kind kind, Growth which, int q,
                    PhaseVariant variant = PhaseVariant::PrintedR11);
// sum (-mu)^q over the grown spectrum minus the same over the smaller one
cplx exact_moment_change(const OccupationSymbol& sym, const Geometry& geo, Kind kind, Growth which, int q);

Geometry shrunk(const Geometry& geo, Growth which);

struct ObservableRow {
    std::string quantity;
    Geometry geo;
    Kind kind = Kind::Plain;
    double asymptotic = 0.0;
    double exact = 0.0;
    double rel_error() const;
};

std::string observables_csv(const std::vector<ObservableRow>& rows);

}  // namespace ffspec
