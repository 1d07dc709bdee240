#pragma once

#include <functional>
#include <vector>

#include "alx/core.hpp"

namespace alx {

// Backgrounds are normalized once and for all: the unit round sphere
// (K_h = +1, area 4*pi) for chi > 0 and the flat unit-area square torus
// (K_h = 0) for chi = 0. Sphere points are unit 3-vectors; torus points live
// in the unit square (x, y), the z component is ignored.

enum class BackgroundKind { Sphere, Torus };

struct Background {
    BackgroundKind kind = BackgroundKind::Sphere;

    static Background sphere() { return {BackgroundKind::Sphere}; }
    static Background torus() { return {BackgroundKind::Torus}; }

    bool is_sphere() const { return kind == BackgroundKind::Sphere; }
    double area() const { return is_sphere() ? 4.0 * kPi : 1.0; }
    double gauss_curvature() const { return is_sphere() ? 1.0 : 0.0; }
    int euler_characteristic() const { return is_sphere() ? 2 : 0; }
    double distance(Vec3 x, Vec3 y) const;
};

Vec2 torus_wrap(Vec2 v);                    // representative in [0,1)^2
Vec2 torus_delta(Vec2 x, Vec2 y);           // x - y wrapped to [-1/2, 1/2)^2
double torus_distance(Vec2 x, Vec2 y);
double sphere_distance(Vec3 x, Vec3 y);

// Zero-mean Green functions of the paper-sign Laplacian: Delta_y G(x, y) =
// delta_x - 1/area. The sphere kernel is closed form; the torus kernel sums
// the dual-lattice series with a heat-kernel (Ewald) split whose tail is
// below 1e-13.
double green_sphere(Vec3 x, Vec3 y);
double green_torus(Vec2 x, Vec2 y);
double green_function(const Background& bg, Vec3 x, Vec3 y);

// ---------------------------------------------------------------------------
// Icosphere and background quadrature
// ---------------------------------------------------------------------------

struct Icosphere {
    int level = 0;
    std::vector<Vec3> verts;
    std::vector<std::array<int, 3>> faces;
    std::vector<Vec3> centroids;      // normalized face centroids
    std::vector<double> face_areas;   // spherical areas, sum 4*pi
    std::vector<std::vector<int>> neighbors;  // vertex 1-rings
};

const Icosphere& icosphere_cached(int level);
double spherical_triangle_area(Vec3 a, Vec3 b, Vec3 c);

struct BgQuadrature {
    std::vector<Vec3> centers;
    std::vector<double> weights;
    double cell_scale = 0.0;  // typical cell diameter
};

// Sphere: icosphere face centroids at `resolution` = subdivision level.
// Torus: resolution x resolution midpoint cells.
BgQuadrature background_quadrature(const Background& bg, int resolution);

// Integral of f against the background area with recursive refinement of the
// cells near the listed points (log-type integrands around atoms).
double integrate_background(const Background& bg, int resolution,
                            const std::function<double(Vec3)>& f,
                            const std::vector<Vec3>& refine_near = {}, int refine_depth = 4);

// ---------------------------------------------------------------------------
// Prescribed measures and potentials
// ---------------------------------------------------------------------------

struct MeasureAtom {
    Vec3 site;
    double mass = 0.0;
};

struct SmoothPart {
    enum class Kind { Zero, Uniform, Grid };
    Kind kind = Kind::Zero;
    double uniform_density = 0.0;
    int resolution = 0;  // grid kind: torus N or icosphere level
    std::vector<double> cell_density;

    static SmoothPart zero() { return {}; }
    static SmoothPart uniform(double density) {
        return {Kind::Uniform, density, 0, {}};
    }
};

class PrescribedMeasure {
public:
    Background background;
    std::vector<MeasureAtom> atoms;
    SmoothPart smooth;

    double smooth_mass() const;
    double total_mass() const;
    double max_atom_mass() const;
    // Integral of a continuous function against the measure; the uniform part
    // uses a quadrature of `uniform_resolution`.
    double integrate(const std::function<double(Vec3)>& f, int uniform_resolution = 0) const;
};

// Potential u(x) = sum_i m_i G(x, y_i) + sum_cells mass_c G(x, c) + offset.
// Uniform smooth parts drop out exactly (G has zero mean).
class PotentialFunction {
public:
    Background background;
    std::vector<MeasureAtom> kernel_atoms;
    std::vector<Vec3> cell_centers;
    std::vector<double> cell_masses;
    double offset = 0.0;

    double operator()(Vec3 x) const;
};

// u = potential of mu. Requires zero total mass and every atom below 2*pi.
PotentialFunction potential_of_measure(const Background& bg, const PrescribedMeasure& mu);

// e^{2u} h realized through its potential; carries the target curvature
// measure for verification.
class SingularMetric {
public:
    Background background;
    PotentialFunction u;
    PrescribedMeasure curvature;

    SingularMetric with_offset(double c) const {
        SingularMetric m = *this;
        m.u.offset += c;
        return m;
    }
};

// Constructive direction of the classification theorem: check Gauss-Bonnet
// and the cusp bound, set mu = omega - K_h dA_h, and take its potential.
SingularMetric build_alexandrov_metric(const Background& bg, const PrescribedMeasure& omega);

// Shortest path with edge weights int e^u dl_h over a geodesic graph on the
// background (icosphere at `resolution` levels on the sphere; resolution^2
// lattice with wraparound on the torus). Monotone upper bounds over the
// built-in refinement ladder.
double metric_distance(const SingularMetric& m, Vec3 x, Vec3 y, int resolution);

// Metric circle length about a point (atoms allowed) from n_rays radial
// probes; rejects radii beyond a quarter of the estimated clearance.
double geodesic_circle_length(const SingularMetric& m, Vec3 center, double radius, int n_rays);

}  // namespace alx
