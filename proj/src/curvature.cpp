#include "alx/curvature.hpp"

#include <cmath>

namespace alx {

double CurvatureMeasure::total_mass() const {
    NeumaierSum s;
    for (const auto& a : atoms) s.add(a.mass);
    for (const auto& e : edges) s.add(e.density * e.length);
    for (const auto& f : faces) s.add(f.mass);
    return s.value();
}

double CurvatureMeasure::total_variation() const {
    NeumaierSum s;
    for (const auto& a : atoms) s.add(std::abs(a.mass));
    for (const auto& e : edges) s.add(std::abs(e.density) * e.length);
    for (const auto& f : faces) s.add(std::abs(f.mass));
    return s.value();
}

double BoundaryTurning::sum() const {
    NeumaierSum s;
    for (double t : turning) s.add(t);
    return s.value();
}

BoundaryTurning BoundaryTurning::of_surface(const ConeSurface& s) {
    BoundaryTurning b;
    const Triangulation& t = s.topo();
    for (const auto& loop : t.boundary_loops())
        for (int slot : loop) {
            const int v = t.vertex_at_corner_id(Triangulation::head_corner(slot));
            const double turn = kPi - s.angle_sum_at_vertex(v);
            require(turn > -kPi && turn < kPi, Err::BadParameter,
                    "boundary turning outside (-pi, pi)");
            b.turning.push_back(turn);
        }
    return b;
}

CurvatureMeasure vertex_curvature_atoms(const ConeSurface& s, VertexAtomOptions opt) {
    CurvatureMeasure m;
    const Triangulation& t = s.topo();
    for (int v = 0; v < t.vertex_count(); ++v) {
        if (t.vertex_is_boundary(v)) continue;
        const double mass = kTwoPi - s.angle_sum_at_vertex(v);
        if (std::abs(mass) < opt.prune_threshold) continue;
        m.atoms.push_back({"v" + std::to_string(v), mass});
    }
    return m;
}

EdgePart edge_curvature_density(double k_plus, double k_minus, double length, std::string id) {
    require(length > 0.0, Err::NonPositiveLength, "curve length must be positive");
    return EdgePart{std::move(id), k_plus - k_minus, length};
}

double gauss_bonnet_residual(const CurvatureMeasure& m, int chi, const BoundaryTurning* boundary) {
    NeumaierSum s;
    for (const auto& a : m.atoms) s.add(a.mass);
    for (const auto& e : m.edges) s.add(e.density * e.length);
    for (const auto& f : m.faces) s.add(f.mass);
    if (boundary)
        for (double t : boundary->turning) s.add(t);
    s.add(-kTwoPi * chi);
    return s.value();
}

std::pair<CurvatureMeasure, CurvatureMeasure> positive_negative_split(const CurvatureMeasure& m) {
    CurvatureMeasure pos, neg;
    for (const auto& a : m.atoms) {
        if (a.mass > 0.0) pos.atoms.push_back(a);
        else if (a.mass < 0.0) neg.atoms.push_back({a.site, -a.mass});
    }
    for (const auto& e : m.edges) {
        if (e.density > 0.0) pos.edges.push_back(e);
        else if (e.density < 0.0) neg.edges.push_back({e.id, -e.density, e.length});
    }
    for (const auto& f : m.faces) {
        if (f.mass > 0.0) pos.faces.push_back(f);
        else if (f.mass < 0.0) neg.faces.push_back({f.id, -f.mass});
    }
    return {pos, neg};
}

TestFunction TestFunction::constant(double value) {
    TestFunction f;
    f.at_site = [value](const std::string&) { return value; };
    f.on_curve = [value](const std::string&, double) { return value; };
    f.on_cell = [value](const std::string&, double, double) { return value; };
    return f;
}

double integrate_test_function(const CurvatureMeasure& m, const TestFunction& f, int resolution) {
    require(resolution >= 2, Err::QuadratureUnderResolved,
            "need at least 2 quadrature nodes per part");
    NeumaierSum s;
    for (const auto& a : m.atoms) s.add(a.mass * f.at_site(a.site));
    for (const auto& e : m.edges) {
        // Composite midpoint rule along the curve; the density is constant,
        // so the integral is density * length * mean(f).
        NeumaierSum mean;
        for (int i = 0; i < resolution; ++i) mean.add(f.on_curve(e.id, (i + 0.5) / resolution));
        s.add(e.density * e.length * mean.value() / resolution);
    }
    for (const auto& c : m.faces) {
        NeumaierSum mean;
        for (int i = 0; i < resolution; ++i)
            for (int j = 0; j < resolution; ++j)
                mean.add(f.on_cell(c.id, (i + 0.5) / resolution, (j + 0.5) / resolution));
        s.add(c.mass * mean.value() / (static_cast<double>(resolution) * resolution));
    }
    return s.value();
}

}  // namespace alx
