#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "alx/conformal.hpp"

using namespace alx;

TEST_CASE("gallery entries and their declared measures") {
    SUBCASE("cone(2pi) is the flat plane") {
        ConformalChartMetric m = make_example_metric(ExampleKind::Cone, kTwoPi);
        CHECK(m.declared.empty());
        CHECK(m.rho_near({0.3, -0.7}) == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("cone(pi) has atom pi at the apex") {
        ConformalChartMetric m = make_example_metric(ExampleKind::Cone, kPi);
        REQUIRE(m.declared.atoms.size() == 1);
        CHECK(m.declared.atoms[0].mass == doctest::Approx(kPi).epsilon(1e-14));
        // beta = -1/2: rho = |z|^{-1}
        CHECK(m.rho_near({0.25, 0.0}) == doctest::Approx(4.0).epsilon(1e-13));
    }
    SUBCASE("glued disks carry density 2 on the seam, total 4pi") {
        ConformalChartMetric m = make_example_metric(ExampleKind::GluedDisks);
        REQUIRE(m.declared.edges.size() == 1);
        CHECK(m.declared.edges[0].density == 2.0);
        CHECK(m.declared.total_mass() == doctest::Approx(4.0 * kPi).epsilon(1e-13));
        CHECK(std::abs(gauss_bonnet_residual(m.declared, 2)) < 1e-12);
    }
    SUBCASE("pseudosphere documents its cusp and cell") {
        ConformalChartMetric m = make_example_metric(ExampleKind::Pseudosphere);
        REQUIRE(m.declared.atoms.size() == 1);
        CHECK(m.declared.atoms[0].mass == doctest::Approx(kTwoPi));
        CHECK(m.declared.total_mass() == doctest::Approx(m.documented_total).epsilon(1e-12));
    }
    SUBCASE("documented totals match") {
        for (auto kind : {ExampleKind::Cone, ExampleKind::HemisphereCylinder,
                          ExampleKind::GluedDisks, ExampleKind::Pseudosphere}) {
            ConformalChartMetric m = make_example_metric(kind, 1.5 * kPi);
            CHECK(m.declared.total_mass() ==
                  doctest::Approx(m.documented_total).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(make_example_metric(ExampleKind::Cone, 0.0), Error);
    CHECK_THROWS_AS(example_kind_from_name("nonsense"), Error);
}

TEST_CASE("flat-plane distances are euclidean") {
    ConformalChartMetric flat = make_example_metric(ExampleKind::Cone, kTwoPi);
    const ChartGridSpec spec{0.08, 2};
    const ChartPoint a{{0.0, 0.0}}, b{{0.9, 0.55}};
    const double d = conformal_distance(flat, a, b, spec);
    const double exact = (b.z - a.z).norm();
    CHECK(d >= exact - 1e-10);
    CHECK(d <= exact * 1.01);
    // Symmetry and coincidence.
    CHECK(conformal_distance(flat, b, a, spec) == doctest::Approx(d).epsilon(1e-14));
    CHECK(conformal_distance(flat, a, a, spec) == 0.0);
}

TEST_CASE("triangle inequality on sampled triples") {
    ConformalChartMetric m = make_example_metric(ExampleKind::Cone, 1.5 * kPi);
    const ChartGridSpec spec{0.1, 1};
    const ChartPoint a{{0.4, 0.1}}, b{{-0.5, 0.3}}, c{{0.1, -0.6}};
    const double ab = conformal_distance(m, a, b, spec);
    const double bc = conformal_distance(m, b, c, spec);
    const double ac = conformal_distance(m, a, c, spec);
    CHECK(ab <= bc + ac + 1e-9);
    CHECK(bc <= ab + ac + 1e-9);
    CHECK(ac <= ab + bc + 1e-9);
}

TEST_CASE("cone apex distance matches the radial oracle") {
    // Radial paths are geodesics to the apex for theta <= 2pi:
    // d(0, z) = |z|^{beta+1}/(beta+1).
    for (double theta : {kPi / 2.0, kPi, 1.5 * kPi}) {
        ConformalChartMetric cone = make_example_metric(ExampleKind::Cone, theta);
        const double beta = theta / kTwoPi - 1.0;
        const double r = 1.0;
        const double oracle = std::pow(r, beta + 1.0) / (beta + 1.0);
        const double d =
            conformal_distance(cone, ChartPoint{{0, 0}}, ChartPoint{{r, 0}}, {0.05, 2});
        CHECK(d >= oracle - 1e-8);
        CHECK(d <= oracle * 1.01);
    }
}

TEST_CASE("cone circle probe recovers the angle") {
    for (double theta : {kPi / 2.0, kPi, 1.5 * kPi}) {
        ConformalChartMetric cone = make_example_metric(ExampleKind::Cone, theta);
        const double r = 0.25;
        const double len = geodesic_circle_length(cone, {0, 0}, r, 64);
        CHECK(len / r == doctest::Approx(theta).epsilon(0.02));
    }
}

TEST_CASE("monotone refinement of conformal distances") {
    ConformalChartMetric cone = make_example_metric(ExampleKind::Cone, 1.5 * kPi);
    double prev = std::numeric_limits<double>::infinity();
    for (int levels = 0; levels <= 2; ++levels) {
        const double d = conformal_distance(cone, ChartPoint{{-0.4, -0.35}},
                                            ChartPoint{{0.8, 0.3}}, {0.12, levels});
        CHECK(d <= prev + 1e-12);
        prev = d;
    }
}

TEST_CASE("glued disks: center to far center is 2 through the seam") {
    ConformalChartMetric m = make_example_metric(ExampleKind::GluedDisks);
    const ChartPoint near_center{{0, 0}, false};
    const ChartPoint far_center{{0, 0}, true};
    const double d = conformal_distance(m, near_center, far_center, {0.08, 2});
    CHECK(d >= 2.0 - 1e-9);
    CHECK(d <= 2.0 * 1.01);
}

TEST_CASE("pseudosphere rejects queries at the cusp") {
    ConformalChartMetric ps = make_example_metric(ExampleKind::Pseudosphere);
    CHECK_THROWS_AS(conformal_distance(ps, ChartPoint{{0, 0}}, ChartPoint{{0.3, 0}}, {0.02, 1}),
                    Error);
    try {
        conformal_distance(ps, ChartPoint{{0, 0}}, ChartPoint{{0.3, 0}}, {0.02, 1});
    } catch (const Error& e) {
        CHECK(e.code() == Err::SingularEndpoint);
    }
    // Interior-to-interior stays finite.
    const double d = conformal_distance(ps, ChartPoint{{0.35, 0}}, ChartPoint{{0, 0.35}},
                                        {0.02, 1});
    CHECK(d > 0.0);
    CHECK(std::isfinite(d));
}

TEST_CASE("hemisphere-cylinder rejects the cylinder end point") {
    ConformalChartMetric m = make_example_metric(ExampleKind::HemisphereCylinder);
    CHECK_THROWS_AS(
        conformal_distance(m, ChartPoint{{0, 0}, true}, ChartPoint{{0, 0}, false}, {0.1, 1}),
        Error);
}

TEST_CASE("curvature recovery from the conformal factor") {
    SUBCASE("zero factor on a flat background") {
        GridSpec spec{{-1, -1}, 0.1, 21, 21, false};
        GridFunction u(spec);
        GridFunction k = smooth_curvature_from_factor(u, nullptr, 0.0);
        for (int j = 1; j < 20; ++j)
            for (int i = 1; i < 20; ++i) CHECK(k.at(i, j) == doctest::Approx(0.0));
    }

    SUBCASE("round sphere factor converges at order h^2") {
        auto u_fn = [](Vec2 z) { return std::log(2.0) - std::log(1.0 + z.squared_norm()); };
        std::vector<double> errs;
        for (double h : {0.1, 0.05, 0.025}) {
            const int n = static_cast<int>(std::round(2.0 / h)) + 1;
            GridSpec spec{{-1, -1}, h, n, n, false};
            GridFunction u = GridFunction::sample(spec, u_fn);
            GridFunction k = smooth_curvature_from_factor(u, nullptr, 0.0);
            double err = 0.0;
            for (int j = 1; j < n - 1; ++j)
                for (int i = 1; i < n - 1; ++i) err = std::max(err, std::abs(k.at(i, j) - 1.0));
            errs.push_back(err);
        }
        const double slope1 = std::log2(errs[0] / errs[1]);
        const double slope2 = std::log2(errs[1] / errs[2]);
        CHECK(slope1 > 1.7);
        CHECK(slope1 < 2.3);
        CHECK(slope2 > 1.7);
        CHECK(slope2 < 2.3);
    }

    SUBCASE("hemisphere-cylinder factor recovers K = 1 inside, 0 outside") {
        ConformalChartMetric m = make_example_metric(ExampleKind::HemisphereCylinder);
        const double h = 0.04;
        const int n = static_cast<int>(std::round(4.0 / h)) + 1;
        GridSpec spec{{-2, -2}, h, n, n, false};
        GridFunction u = GridFunction::sample(spec, [&](Vec2 z) {
            if (std::abs(z.norm() - 1.0) < 3.0 * h)
                return std::numeric_limits<double>::quiet_NaN();  // seam mask
            return 0.5 * std::log(m.rho_near(z));
        });
        GridFunction k = smooth_curvature_from_factor(u, nullptr, 0.0);
        double err_in = 0.0, err_out = 0.0;
        for (int j = 1; j < n - 1; ++j)
            for (int i = 1; i < n - 1; ++i) {
                const double r = k.pos(i, j).norm();
                if (std::isnan(k.at(i, j))) continue;
                if (r < 0.85) err_in = std::max(err_in, std::abs(k.at(i, j) - 1.0));
                if (r > 1.15 && r < 1.9) err_out = std::max(err_out, std::abs(k.at(i, j)));
            }
        CHECK(err_in < 5e-3);
        CHECK(err_out < 5e-3);
    }

    SUBCASE("mask fraction guard") {
        GridSpec spec{{-1, -1}, 0.1, 21, 21, false};
        GridFunction u = GridFunction::sample(spec, [](Vec2 z) {
            return z.x > 0 ? std::numeric_limits<double>::quiet_NaN() : 0.0;
        });
        CHECK_THROWS_AS(smooth_curvature_from_factor(u, nullptr, 0.0), Error);
    }
}
