#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "alx/mesh.hpp"

namespace alx {

// A point on a cone surface: face id plus normalized barycentric coordinates.
// Points on a shared edge compare equal across the two incident faces.
struct SurfacePoint {
    int face = 0;
    std::array<double, 3> bary{1.0, 0.0, 0.0};

    static SurfacePoint at_corner(int face, int corner) {
        SurfacePoint p;
        p.face = face;
        p.bary = {0.0, 0.0, 0.0};
        p.bary[corner] = 1.0;
        return p;
    }
    static SurfacePoint barycenter(int face) {
        return SurfacePoint{face, {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}};
    }
};

// One-to-all graph distances from a source at a fixed refinement level.
// Nodes are the surface vertices followed by the Steiner points; distances are
// upper bounds that converge under refinement.
struct DistanceField {
    int level = 0;
    int source_node = -1;
    std::vector<double> node_distance;
};

// Upper bound on the intrinsic distance: Dijkstra on the graph with dyadic
// Steiner subdivision of the edges (2^level segments per edge), followed by a
// funnel straightening pass across the traversed face strip. The returned
// value is the running minimum over levels 0..level, hence nonincreasing in
// `level`.
double intrinsic_distance(const ConeSurface& s, const SurfacePoint& x, const SurfacePoint& y,
                          int level);

struct GeodesicPolyline {
    double length = 0.0;
    std::vector<SurfacePoint> points;
};

// Straightened path realizing the bound reported at exactly this level.
GeodesicPolyline intrinsic_path(const ConeSurface& s, const SurfacePoint& x,
                                const SurfacePoint& y, int level);

DistanceField compute_distance_field(const ConeSurface& s, const SurfacePoint& x, int level);

// Sampled sup |d1 - d2|; a lower bound of the true uniform distance, monotone
// under sample inclusion.
double uniform_distance(const std::vector<double>& d1, const std::vector<double>& d2);

template <class Point, class F1, class F2>
double uniform_distance(F1&& d1, F2&& d2, const std::vector<std::pair<Point, Point>>& pairs) {
    require(!pairs.empty(), Err::EmptySample, "uniform distance needs a nonempty sample");
    double best = 0.0;
    for (const auto& [a, b] : pairs) best = std::max(best, std::abs(d1(a, b) - d2(a, b)));
    return best;
}

// Length of the polygonal approximation of the metric circle of the given
// radius about a vertex, from n_rays probe directions in the developed cone
// neighborhood. radius must stay below a quarter of the shortest incident
// edge (the local injectivity heuristic).
double geodesic_circle_length(const ConeSurface& s, int vertex, double radius, int n_rays);

}  // namespace alx
