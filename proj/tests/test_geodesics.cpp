#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "alx/geodesics.hpp"
#include "alx/mesh.hpp"

using namespace alx;

namespace {

// ---------------------------------------------------------------------------
// Test-only exhaustive unfolding oracle: enumerate face sequences up to a
// depth bound, unfold each into the plane, and accept the straight segment
// when it clears every portal. Independent of the library's funnel pass.
// ---------------------------------------------------------------------------

struct TRigid {
    double c = 1, s = 0;
    Vec2 t;
    Vec2 apply(Vec2 p) const { return {c * p.x - s * p.y + t.x, s * p.x + c * p.y + t.y}; }
};

TRigid align(Vec2 p0, Vec2 p1, Vec2 q0, Vec2 q1) {
    const Vec2 u = p1 - p0, v = q1 - q0;
    const double n2 = u.squared_norm();
    TRigid r;
    r.c = u.dot(v) / n2;
    r.s = u.cross(v) / n2;
    r.t = q0 - Vec2{r.c * p0.x - r.s * p0.y, r.s * p0.x + r.c * p0.y};
    return r;
}

struct Oracle {
    const ConeSurface& s;
    int max_depth;
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> portal_slots;

    bool clears_portals(Vec2 a, Vec2 b, const std::vector<std::array<Vec2, 3>>& placed) const {
        for (size_t j = 0; j < portal_slots.size(); ++j) {
            const int slot = portal_slots[j];
            const int sl = slot % 3;
            const Vec2 L = placed[j][(sl + 1) % 3];
            const Vec2 R = placed[j][(sl + 2) % 3];
            const Vec2 d = b - a, e = R - L;
            const double den = d.cross(e);
            if (std::abs(den) < 1e-15) return false;
            const double tt = (L - a).cross(e) / den;
            const double uu = (L - a).cross(d) / den;
            if (tt < -1e-12 || tt > 1 + 1e-12 || uu < -1e-9 || uu > 1 + 1e-9) return false;
        }
        return true;
    }

    void dfs(std::vector<int>& faces, std::vector<std::array<Vec2, 3>>& placed, int corner_from,
             int vertex_to) {
        const Triangulation& t = s.topo();
        const int f = faces.back();
        for (int c = 0; c < 3; ++c) {
            if (t.vertex_at(f, c) != vertex_to) continue;
            const Vec2 a = placed.front()[corner_from];
            const Vec2 b = placed.back()[c];
            if (clears_portals(a, b, placed)) best = std::min(best, (b - a).norm());
        }
        if (static_cast<int>(faces.size()) >= max_depth) return;
        for (int i = 0; i < 3; ++i) {
            const int slot = 3 * f + i;
            const int p = t.partner(slot);
            if (p < 0) continue;
            const int nf = p / 3;
            bool seen = false;
            for (int g : faces) seen |= (g == nf);
            if (seen) continue;
            const auto dev = s.develop_face(nf);
            const int pl = p % 3;
            const TRigid r = align(dev[(pl + 2) % 3], dev[(pl + 1) % 3],
                                   placed.back()[(i + 1) % 3], placed.back()[(i + 2) % 3]);
            std::array<Vec2, 3> np;
            for (int c = 0; c < 3; ++c) np[c] = r.apply(dev[c]);
            faces.push_back(nf);
            placed.push_back(np);
            portal_slots.push_back(slot);
            dfs(faces, placed, corner_from, vertex_to);
            faces.pop_back();
            placed.pop_back();
            portal_slots.pop_back();
        }
    }
};

double oracle_vertex_distance(const ConeSurface& s, int va, int vb, int max_depth) {
    Oracle o{s, max_depth, std::numeric_limits<double>::infinity(), {}};
    const Triangulation& t = s.topo();
    for (int f = 0; f < t.face_count(); ++f)
        for (int c = 0; c < 3; ++c) {
            if (t.vertex_at(f, c) != va) continue;
            std::vector<int> faces{f};
            std::vector<std::array<Vec2, 3>> placed{s.develop_face(f)};
            o.portal_slots.clear();
            o.dfs(faces, placed, c, vb);
        }
    return o.best;
}

int find_cube_vertex(const ConeSurface& cube, Vec3 pos) {
    const auto& cp = cube.corner_positions();
    for (int c = 0; c < static_cast<int>(cp.size()); ++c)
        if ((cp[c] - pos).norm() < 1e-12) return cube.topo().vertex_at_corner_id(c);
    FAIL("cube vertex not found");
    return -1;
}

SurfacePoint vertex_point(const ConeSurface& s, int v) {
    const int corner = s.topo().vertex_fan(v).front();
    return SurfacePoint::at_corner(corner / 3, corner % 3);
}

// Square torus helpers: map (u,v) in the unit square to a SurfacePoint of
// make_square_torus() (face 0 below the diagonal, face 1 above).
SurfacePoint torus_point(double u, double v) {
    SurfacePoint p;
    if (u >= v) {
        p.face = 0;  // corners A(0,0) B(1,0) C(1,1)
        p.bary = {1.0 - u, u - v, v};
    } else {
        p.face = 1;  // corners A(0,0) C(1,1) D(0,1)
        p.bary = {1.0 - v, u, v - u};
    }
    return p;
}

double torus_exact(double ux, double vx, double uy, double vy) {
    double best = std::numeric_limits<double>::infinity();
    for (int kx = -2; kx <= 2; ++kx)
        for (int ky = -2; ky <= 2; ++ky)
            best = std::min(best, std::hypot(uy - ux + kx, vy - vx + ky));
    return best;
}

}  // namespace

TEST_CASE("cube opposite corners: sqrt(5) against the unfolding oracle") {
    ConeSurface cube = make_cube_surface();
    const int va = find_cube_vertex(cube, {0, 0, 0});
    const int vb = find_cube_vertex(cube, {1, 1, 1});
    const double oracle = oracle_vertex_distance(cube, va, vb, 4);
    CHECK(oracle == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));

    const double d = intrinsic_distance(cube, vertex_point(cube, va), vertex_point(cube, vb), 4);
    CHECK(std::abs(d - oracle) < 1e-4);
    CHECK(d >= oracle - 1e-9);
}

TEST_CASE("flat torus distances match the lattice oracle") {
    ConeSurface torus = make_square_torus();

    SUBCASE("vertex to square center") {
        const double d =
            intrinsic_distance(torus, vertex_point(torus, 0), torus_point(0.5, 0.5), 3);
        CHECK(d == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-9));
    }

    SUBCASE("random pairs within 1 percent at the default level") {
        std::mt19937_64 rng(314159);
        std::uniform_real_distribution<double> unit(0.02, 0.98);
        for (int trial = 0; trial < 15; ++trial) {
            const double ux = unit(rng), vx = unit(rng), uy = unit(rng), vy = unit(rng);
            const double exact = torus_exact(ux, vx, uy, vy);
            if (exact < 0.05) continue;
            const double d =
                intrinsic_distance(torus, torus_point(ux, vx), torus_point(uy, vy), 4);
            CHECK(d >= exact - 1e-9);
            CHECK(d <= exact * 1.01);
        }
    }
}

TEST_CASE("coincident points have zero distance") {
    ConeSurface cube = make_cube_surface();
    const SurfacePoint p = SurfacePoint::barycenter(3);
    CHECK(intrinsic_distance(cube, p, p, 2) == doctest::Approx(0.0).epsilon(1e-15));
    // Same edge point seen from the two incident faces.
    ConeSurface torus = make_square_torus();
    SurfacePoint a;
    a.face = 0;
    a.bary = {0.5, 0.0, 0.5};
    SurfacePoint b;
    b.face = 1;
    b.bary = {0.5, 0.5, 0.0};
    CHECK(intrinsic_distance(torus, a, b, 2) < 1e-12);
}

TEST_CASE("symmetry and triangle inequality") {
    ConeSurface cube = make_cube_surface();
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> face(0, 11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto rand_point = [&]() {
        SurfacePoint p;
        p.face = face(rng);
        double a = unit(rng), b = unit(rng);
        if (a + b > 1.0) {
            a = 1.0 - a;
            b = 1.0 - b;
        }
        p.bary = {a, b, 1.0 - a - b};
        return p;
    };
    for (int trial = 0; trial < 10; ++trial) {
        const SurfacePoint x = rand_point(), y = rand_point(), z = rand_point();
        const double xy = intrinsic_distance(cube, x, y, 3);
        const double yx = intrinsic_distance(cube, y, x, 3);
        CHECK(std::abs(xy - yx) < 1e-9);
        const double xz = intrinsic_distance(cube, x, z, 3);
        const double yz = intrinsic_distance(cube, y, z, 3);
        CHECK(xy <= xz + yz + 1e-9);
    }
}

TEST_CASE("refinement is monotone and homothety is exact") {
    ConeSurface cube = make_cube_surface();
    const int va = find_cube_vertex(cube, {0, 0, 0});
    const int vb = find_cube_vertex(cube, {1, 1, 1});
    const SurfacePoint x = vertex_point(cube, va), y = vertex_point(cube, vb);
    double prev = std::numeric_limits<double>::infinity();
    for (int level = 0; level <= 4; ++level) {
        const double d = intrinsic_distance(cube, x, y, level);
        CHECK(d <= prev + 1e-12);
        prev = d;
    }

    const double lambda = 2.75;
    const double d1 = intrinsic_distance(cube, x, y, 2);
    const double d2 = intrinsic_distance(cube.scaled(lambda), x, y, 2);
    CHECK(std::abs(d2 - lambda * d1) <= 1e-12 * d2);
}

TEST_CASE("uniform distance over samples") {
    CHECK_THROWS_AS(uniform_distance({}, {}), Error);

    std::vector<double> d1 = {0.4, 1.0, 0.7};
    CHECK(uniform_distance(d1, d1) == 0.0);
    std::vector<double> d2 = {0.8, 2.0, 1.4};
    // |2d - d| = d: the sampled value is max d1.
    CHECK(uniform_distance(d1, d2) == doctest::Approx(1.0));

    using P = std::pair<double, double>;
    std::vector<std::pair<P, P>> pairs = {{{0, 0}, {1, 0}}, {{0, 0}, {0.3, 0.4}}};
    auto eu = [](P a, P b) { return std::hypot(a.first - b.first, a.second - b.second); };
    auto man = [](P a, P b) {
        return std::abs(a.first - b.first) + std::abs(a.second - b.second);
    };
    const double dab = uniform_distance(eu, man, pairs);
    CHECK(dab == doctest::Approx(0.2));
    CHECK(uniform_distance(man, eu, pairs) == doctest::Approx(dab));
    CHECK(uniform_distance(eu, eu, pairs) == 0.0);
}

TEST_CASE("geodesic circle length") {
    ConeSurface hex = make_flat_hexagon_disk();
    int flat_vertex = -1;
    for (int v = 0; v < hex.topo().vertex_count(); ++v)
        if (!hex.topo().vertex_is_boundary(v)) flat_vertex = v;
    REQUIRE(flat_vertex >= 0);
    const double r = 0.2;
    CHECK(geodesic_circle_length(hex, flat_vertex, r, 64) ==
          doctest::Approx(kTwoPi * r).epsilon(0.01));

    ConeSurface cube = make_cube_surface();
    CHECK(geodesic_circle_length(cube, 0, r, 64) ==
          doctest::Approx(1.5 * kPi * r).epsilon(0.02));

    CHECK_THROWS_AS(geodesic_circle_length(cube, 0, 10.0, 64), Error);
}

TEST_CASE("distance field basics") {
    ConeSurface cube = make_cube_surface();
    const SurfacePoint src = SurfacePoint::at_corner(0, 0);
    DistanceField f = compute_distance_field(cube, src, 2);
    REQUIRE(f.source_node >= 0);
    CHECK(f.node_distance[f.source_node] == 0.0);
    for (double d : f.node_distance) CHECK(d >= 0.0);
}

TEST_CASE("straightened path endpoints and length") {
    ConeSurface cube = make_cube_surface();
    const int va = find_cube_vertex(cube, {0, 0, 0});
    const int vb = find_cube_vertex(cube, {1, 1, 1});
    GeodesicPolyline path =
        intrinsic_path(cube, vertex_point(cube, va), vertex_point(cube, vb), 4);
    CHECK(path.length == doctest::Approx(std::sqrt(5.0)).epsilon(1e-4));
    CHECK(path.points.size() >= 2);
}
