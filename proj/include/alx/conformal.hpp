#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "alx/curvature.hpp"

namespace alx {

// Declared structure of a chart density rho(z)|dz|^2. Point singularities
// carry the growth exponent beta with rho ~ c|z-p|^{2*beta}; cusp points
// (atom mass exactly 2*pi, infinite distance) are excluded from queries.
struct SingularPointDecl {
    Vec2 pos;
    double exponent = 0.0;
    bool cusp = false;
    std::string label;
};

// Circle |z| = radius (chart-centered) across which the density is only C^0;
// quadrature splits segments there.
struct SingularCircleDecl {
    double radius = 1.0;
    std::string label;
};

// A point of a chart metric. For two-chart metrics on the extended plane the
// far chart carries the coordinate w = 1/z.
struct ChartPoint {
    Vec2 z;
    bool far_chart = false;
};

class ConformalChartMetric {
public:
    std::string name;

    std::function<double(Vec2)> rho_near;
    std::function<double(Vec2)> rho_far;  // set iff two_chart
    bool two_chart = false;

    // Single-chart domain: a box, optionally restricted to an annulus
    // annulus_inner < |z| < annulus_outer (pseudosphere).
    Vec2 box_lo{-2.0, -2.0}, box_hi{2.0, 2.0};
    bool unbounded = false;  // box grows to cover the query points
    double annulus_inner = 0.0, annulus_outer = 0.0;

    std::vector<SingularPointDecl> singular_points_near;
    std::vector<SingularPointDecl> singular_points_far;
    std::vector<SingularCircleDecl> singular_circles;  // present on both charts

    CurvatureMeasure declared;
    double documented_total = 0.0;
    std::string notes;

    double density(const ChartPoint& p) const {
        return p.far_chart ? rho_far(p.z) : rho_near(p.z);
    }
};

enum class ExampleKind { Cone, HemisphereCylinder, GluedDisks, Pseudosphere };

// Gallery of closed-form singular conformal metrics. `theta` is the cone
// angle and is only read for ExampleKind::Cone.
ConformalChartMetric make_example_metric(ExampleKind kind, double theta = kTwoPi);
ExampleKind example_kind_from_name(const std::string& name);

struct ChartGridSpec {
    double spacing = 0.05;  // coarsest grid spacing
    int levels = 2;         // dyadic refinements; knight moves on the finest
};

// Shortest path on the stitched chart grid graph with edge weights
// int sqrt(rho) ds; returns the running minimum over the refinement ladder,
// hence monotone under refinement.
double conformal_distance(const ConformalChartMetric& m, ChartPoint a, ChartPoint b,
                          const ChartGridSpec& spec);

// Metric circle length about a chart point from n_rays radial probes.
double geodesic_circle_length(const ConformalChartMetric& m, Vec2 center, double radius,
                              int n_rays, const std::optional<double>& ray_spacing = {});

// ---------------------------------------------------------------------------
// Grid functions and curvature recovery from a conformal factor
// ---------------------------------------------------------------------------

struct GridSpec {
    Vec2 origin;
    double h = 0.1;
    int nx = 10, ny = 10;
    bool periodic = false;  // unit-cell wraparound in both directions
};

class GridFunction {
public:
    GridSpec spec;
    std::vector<double> values;  // row-major: index = j*nx + i

    GridFunction() = default;
    explicit GridFunction(const GridSpec& s)
        : spec(s), values(static_cast<size_t>(s.nx) * s.ny, 0.0) {}

    double at(int i, int j) const { return values[static_cast<size_t>(j) * spec.nx + i]; }
    double& at(int i, int j) { return values[static_cast<size_t>(j) * spec.nx + i]; }
    Vec2 pos(int i, int j) const {
        return {spec.origin.x + i * spec.h, spec.origin.y + j * spec.h};
    }

    static GridFunction sample(const GridSpec& s, const std::function<double(Vec2)>& f);
    int masked_count() const;
};

// K~ = e^{-2u} (K0 + Laplacian u) with the 5-point stencil and the sign
// convention Laplacian = -(d^2/dx^2 + d^2/dy^2) on the flat background chart.
// Nodes without valid stencil data (masked input, grid boundary) come out
// NaN; more than max_mask_fraction masked interior nodes raises MaskTooLarge.
GridFunction smooth_curvature_from_factor(const GridFunction& u, const GridFunction* K0_grid,
                                          double K0_const, double max_mask_fraction = 0.2);

}  // namespace alx
