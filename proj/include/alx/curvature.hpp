#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "alx/mesh.hpp"

namespace alx {

// A signed Radon measure kept in symbolic form: point atoms, constant linear
// densities along curves, and per-cell totals. Exact for polyhedral and
// piecewise-smooth gluings; weak-convergence experiments integrate against it
// with their own test-function dictionaries.

struct AtomPart {
    std::string site;
    double mass = 0.0;  // radians
};

struct EdgePart {
    std::string id;
    double density = 0.0;  // per unit length
    double length = 0.0;
};

struct FacePart {
    std::string id;
    double mass = 0.0;  // total signed mass of the cell
};

class CurvatureMeasure {
public:
    std::vector<AtomPart> atoms;
    std::vector<EdgePart> edges;
    std::vector<FacePart> faces;

    double total_mass() const;
    double total_variation() const;
    bool empty() const { return atoms.empty() && edges.empty() && faces.empty(); }
};

// Exterior turning angles at the boundary vertices of a surface with boundary,
// loop by loop. Each turning lies in (-pi, pi).
struct BoundaryTurning {
    std::vector<double> turning;
    double sum() const;
    static BoundaryTurning of_surface(const ConeSurface& s);
};

struct VertexAtomOptions {
    // Atoms below this threshold are rounding noise from angle sums and are
    // dropped.
    double prune_threshold = 1e-10;
};

// One atom of mass 2*pi - (incident angle sum) per interior vertex.
CurvatureMeasure vertex_curvature_atoms(const ConeSurface& s, VertexAtomOptions opt = {});

// Edge part with density k+ - k- (jump of geodesic curvature across the glue
// curve) over a curve of the given length.
EdgePart edge_curvature_density(double k_plus, double k_minus, double length,
                                std::string id = "edge");

// total(measure) + sum of boundary turnings - 2*pi*chi. Zero certifies the
// measure. The closed case needs no turning argument; the boundary form adds
// the standard exterior-angle term.
double gauss_bonnet_residual(const CurvatureMeasure& m, int chi,
                             const BoundaryTurning* boundary = nullptr);

// (omega+, omega-) with omega = omega+ - omega-, both nonnegative, supports
// disjoint part by part.
std::pair<CurvatureMeasure, CurvatureMeasure> positive_negative_split(const CurvatureMeasure& m);

// Evaluation interface for integrate_test_function. The evaluator owns the
// geometry: curves are parametrized over [0,1], cells over the unit square
// with an area-uniform parametrization.
struct TestFunction {
    std::function<double(const std::string&)> at_site;
    std::function<double(const std::string&, double)> on_curve;
    std::function<double(const std::string&, double, double)> on_cell;

    static TestFunction constant(double value);
};

// Atoms are evaluated exactly; curve and cell parts by the composite midpoint
// rule with `resolution` nodes per part (resolution^2 on cells).
double integrate_test_function(const CurvatureMeasure& m, const TestFunction& f, int resolution);

}  // namespace alx
