#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "alx/mesh.hpp"

using namespace alx;

TEST_CASE("double triangle is a sphere") {
    ConeSurface s = make_triangle_double(1.0, 1.0, 1.0);
    CHECK(s.topo().euler_characteristic() == 2);
    CHECK(s.topo().vertex_count() == 3);
    CHECK(s.topo().edge_count() == 3);
    CHECK(s.topo().closed());
}

TEST_CASE("square torus has chi zero and one vertex") {
    ConeSurface s = make_square_torus();
    CHECK(s.topo().euler_characteristic() == 0);
    CHECK(s.topo().vertex_count() == 1);
    CHECK(s.topo().closed());
    // The single vertex is flat: full angle 2*pi.
    CHECK(s.angle_sum_at_vertex(0) == doctest::Approx(kTwoPi).epsilon(1e-12));
}

TEST_CASE("one unglued triangle is a disk") {
    Triangulation t = Triangulation::build(1, {});
    CHECK(t.euler_characteristic() == 1);
    CHECK(t.boundary_loops().size() == 1);
    CHECK(t.boundary_loops()[0].size() == 3);
    CHECK_FALSE(t.closed());
}

TEST_CASE("cube surface: twelve faces, eight cone vertices") {
    ConeSurface s = make_cube_surface();
    CHECK(s.topo().face_count() == 12);
    CHECK(s.topo().vertex_count() == 8);
    CHECK(s.topo().euler_characteristic() == 2);
    for (int v = 0; v < 8; ++v)
        CHECK(s.angle_sum_at_vertex(v) == doctest::Approx(1.5 * kPi).epsilon(1e-13));
}

TEST_CASE("vertex angles") {
    ConeSurface eq = make_triangle_double(1.0, 1.0, 1.0);
    CHECK(vertex_angle(eq, {0, 0}) == doctest::Approx(kPi / 3.0).epsilon(1e-13));

    ConeSurface iso = make_triangle_double(std::sqrt(2.0), 1.0, 1.0);
    // Corner 0 is opposite the hypotenuse.
    CHECK(vertex_angle(iso, {0, 0}) == doctest::Approx(kPi / 2.0).epsilon(1e-13));

    // (3,4,5): right angle opposite the hypotenuse; frozen from the
    // law-of-cosines oracle arccos((9+16-25)/24) = pi/2.
    ConeSurface pyth = make_triangle_double(5.0, 4.0, 3.0);
    CHECK(std::abs(vertex_angle(pyth, {0, 0}) - kPi / 2.0) < 1e-12);
}

TEST_CASE("angles of every face sum to pi") {
    std::mt19937_64 rng(20240901);
    std::uniform_real_distribution<double> len(1.0, 1.95);
    for (int trial = 0; trial < 200; ++trial) {
        ConeSurface s = make_triangle_double(len(rng), len(rng), len(rng));
        for (int f = 0; f < 2; ++f) {
            double sum = 0.0;
            for (int i = 0; i < 3; ++i) sum += s.corner_angle(f, i);
            CHECK(sum == doctest::Approx(kPi).epsilon(1e-12));
        }
    }
}

TEST_CASE("random closed gluings have even Euler characteristic") {
    // Random fixed-point-free pairings of the slots of 4 faces, coherently
    // oriented, give closed oriented complexes whenever they are connected.
    std::mt19937_64 rng(7);
    int built = 0;
    for (int trial = 0; trial < 200 && built < 40; ++trial) {
        std::vector<int> slots(12);
        for (int i = 0; i < 12; ++i) slots[i] = i;
        std::shuffle(slots.begin(), slots.end(), rng);
        std::vector<std::array<int, 2>> gluing;
        for (int i = 0; i < 12; i += 2) gluing.push_back({slots[i], slots[i + 1]});
        try {
            Triangulation t = Triangulation::build(4, gluing);
            CHECK(t.closed());
            CHECK(t.euler_characteristic() % 2 == 0);
            ++built;
        } catch (const Error& e) {
            CHECK(e.code() == Err::Disconnected);
        }
    }
    CHECK(built >= 10);
}

TEST_CASE("gluing validation errors") {
    // An edge glued to two partners.
    CHECK_THROWS_WITH_AS(Triangulation::build(2, {{{0, 3}}, {{0, 4}}}), doctest::Contains("NonManifold"),
                         Error);
    // An edge glued to itself.
    CHECK_THROWS_AS(Triangulation::build(1, {{{0, 0}}}), Error);
    // Same-direction identification.
    try {
        Triangulation::build(2, {{{0, -4}}});
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == Err::OrientationClash);
    }
    // Two disjoint components.
    try {
        Triangulation::build(4, {{{0, 3}}, {{1, 4}}, {{2, 5}}, {{6, 9}}, {{7, 10}}, {{8, 11}}});
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == Err::Disconnected);
    }
}

TEST_CASE("length validation") {
    Triangulation topo = Triangulation::build(2, {{{0, 3}}, {{1, 5}}, {{2, 4}}});
    // Triangle inequality (1,1,3) fails.
    CHECK_THROWS_AS(ConeSurface::glue(topo, {3.0, 1.0, 1.0, 3.0, 1.0, 1.0}), Error);
    try {
        ConeSurface::glue(topo, {3.0, 1.0, 1.0, 3.0, 1.0, 1.0});
    } catch (const Error& e) {
        CHECK(e.code() == Err::TriangleInequalityViolated);
    }
    // Glued edges must carry equal lengths.
    try {
        ConeSurface::glue(topo, {1.0, 1.0, 1.0, 1.2, 1.0, 1.0});
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == Err::LengthMismatch);
    }
    try {
        ConeSurface::glue(topo, {1.0, 0.0, 1.0, 1.0, 1.0, 0.0});
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == Err::NonPositiveLength);
    }
}

TEST_CASE("glue then read back lengths is the identity") {
    Triangulation topo = Triangulation::build(2, {{{0, 3}}, {{1, 5}}, {{2, 4}}});
    std::vector<double> len = {1.25, 0.75, 1.0, 1.25, 1.0, 0.75};
    ConeSurface s = ConeSurface::glue(topo, len);
    for (int i = 0; i < 6; ++i) CHECK(s.length(i) == len[i]);
}

TEST_CASE("build_triangulation accepts permuted edge labels") {
    // Same square torus, with labels listed per face.
    std::vector<std::array<int, 3>> faces = {{{0, 1, 2}}, {{3, 4, 5}}};
    std::vector<std::array<int, 2>> gluing = {{{1, 5}}, {{2, 3}}, {{0, 4}}};
    Triangulation t = build_triangulation(faces, gluing);
    CHECK(t.euler_characteristic() == 0);

    std::vector<std::array<int, 3>> faces2 = {{{2, 0, 4}}, {{1, 3, 5}}};
    std::vector<std::array<int, 2>> gluing2 = {{{0, 5}}, {{4, 1}}, {{2, 3}}};
    Triangulation t2 = build_triangulation(faces2, gluing2);
    CHECK(t2.euler_characteristic() == 0);
    CHECK(t2.vertex_count() == 1);
}

TEST_CASE("face development is isometric") {
    ConeSurface s = make_cube_surface();
    for (int f = 0; f < s.topo().face_count(); ++f) {
        auto dev = s.develop_face(f);
        CHECK((dev[2] - dev[1]).norm() == doctest::Approx(s.length(3 * f)).epsilon(1e-13));
        CHECK((dev[0] - dev[2]).norm() == doctest::Approx(s.length(3 * f + 1)).epsilon(1e-13));
        CHECK((dev[1] - dev[0]).norm() == doctest::Approx(s.length(3 * f + 2)).epsilon(1e-13));
        CHECK((dev[1] - dev[0]).cross(dev[2] - dev[0]) > 0.0);
    }
}
