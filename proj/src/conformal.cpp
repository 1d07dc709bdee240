#include "alx/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "alx/quadrature.hpp"

namespace alx {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vec2 invert(Vec2 z) {  // w = 1/z as a holomorphic coordinate
    const double n2 = z.squared_norm();
    return {z.x / n2, -z.y / n2};
}

// One chart of a metric: density plus its declared singular structure.
struct ChartView {
    const std::function<double(Vec2)>* rho = nullptr;
    const std::vector<SingularPointDecl>* points = nullptr;
    const std::vector<SingularCircleDecl>* circles = nullptr;

    double sqrt_rho(Vec2 z) const { return std::sqrt((*rho)(z)); }
};

ChartView near_view(const ConformalChartMetric& m) {
    return {&m.rho_near, &m.singular_points_near, &m.singular_circles};
}
ChartView far_view(const ConformalChartMetric& m) {
    return {&m.rho_far, &m.singular_points_far, &m.singular_circles};
}

const SingularPointDecl* singular_at(const ChartView& c, Vec2 p, double tol) {
    for (const auto& sp : *c.points)
        if ((sp.pos - p).norm() <= tol) return &sp;
    return nullptr;
}

// Metric length of the straight chart segment [a, b]. Splits at declared
// kink circles; a segment starting or ending at a non-cusp singular point is
// integrated with the power-endpoint substitution; a singular point in the
// interior is excised with half-width h/1000 (documented bias, vanishes
// under refinement for integrable singularities).
double segment_weight(const ChartView& c, Vec2 a, Vec2 b, double h) {
    const Vec2 d = b - a;
    const double L = d.norm();
    if (L == 0.0) return 0.0;
    const Vec2 dir = d / L;

    struct Piece {
        double t0, t1;
    };
    std::vector<double> cuts = {0.0, 1.0};
    for (const auto& circ : *c.circles) {
        // |a + t d|^2 = R^2
        const double A = d.squared_norm();
        const double B = 2.0 * a.dot(d);
        const double C = a.squared_norm() - circ.radius * circ.radius;
        const double disc = B * B - 4 * A * C;
        if (disc <= 0) continue;
        const double sq = std::sqrt(disc);
        for (double t : {(-B - sq) / (2 * A), (-B + sq) / (2 * A)})
            if (t > 1e-12 && t < 1.0 - 1e-12) cuts.push_back(t);
    }

    const double endpoint_tol = 1e-11 * std::max(1.0, L);
    const SingularPointDecl* sing_a = singular_at(c, a, endpoint_tol);
    const SingularPointDecl* sing_b = singular_at(c, b, endpoint_tol);

    std::vector<std::pair<double, double>> excised;  // skipped parameter slivers
    for (const auto& sp : *c.points) {
        const double tp = (sp.pos - a).dot(d) / d.squared_norm();
        if (tp <= 1e-9 || tp >= 1.0 - 1e-9) continue;
        const Vec2 foot = a + d * tp;
        if ((foot - sp.pos).norm() > 1e-11 * std::max(1.0, L)) continue;
        const double delta = (h / 1000.0) / L;
        cuts.push_back(std::max(0.0, tp - delta));
        cuts.push_back(std::min(1.0, tp + delta));
        excised.push_back({tp - delta, tp + delta});
    }

    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double x, double y) { return std::abs(x - y) < 1e-15; }),
               cuts.end());

    auto is_excised = [&](double t0, double t1) {
        const double mid = 0.5 * (t0 + t1);
        for (const auto& [lo, hi] : excised)
            if (mid > lo && mid < hi) return true;
        return false;
    };

    // Split each piece at the closest approach to every point singularity so
    // the power boundary layers sit at piece ends where the adaptive rule
    // resolves them.
    bool any_singular = !c.points->empty();
    for (const auto& sp : *c.points) {
        const double tp = (sp.pos - a).dot(d) / d.squared_norm();
        if (tp > 1e-12 && tp < 1.0 - 1e-12) cuts.push_back(tp);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double x, double y) { return std::abs(x - y) < 1e-15; }),
               cuts.end());

    NeumaierSum total;
    for (size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double t0 = cuts[k], t1 = cuts[k + 1];
        if (t1 - t0 < 1e-15 || is_excised(t0, t1)) continue;
        const double s0 = t0 * L, s1 = t1 * L;
        auto f = [&](double s) { return c.sqrt_rho(a + dir * s); };
        if (k == 0 && sing_a && !sing_a->cusp) {
            total.add(gauss3_power_endpoint(f, s1 - s0, sing_a->exponent, 48));
        } else if (k + 2 == cuts.size() && sing_b && !sing_b->cusp) {
            auto rf = [&](double s) { return c.sqrt_rho(b - dir * s); };
            total.add(gauss3_power_endpoint(rf, s1 - s0, sing_b->exponent, 48));
        } else if (any_singular || !c.circles->empty()) {
            total.add(gauss3_adaptive([&](double s) { return f(s); }, s0, s1, 1e-12, 36));
        } else {
            total.add(gauss3_composite([&](double s) { return f(s); }, s0, s1, 4));
        }
    }
    return total.value();
}

// ---------------------------------------------------------------------------
// Grid graph over one or two charts
// ---------------------------------------------------------------------------

struct ChartGrid {
    Vec2 lo;
    double h = 0.0;
    int nx = 0, ny = 0;
    std::vector<int> node_id;  // -1 excluded
    Vec2 pos(int i, int j) const { return {lo.x + i * h, lo.y + j * h}; }
    int id(int i, int j) const {
        if (i < 0 || j < 0 || i >= nx || j >= ny) return -1;
        return node_id[static_cast<size_t>(j) * nx + i];
    }
};

struct DistGraph {
    std::vector<std::vector<std::pair<int, double>>> adj;
    int add_node() {
        adj.push_back({});
        return static_cast<int>(adj.size()) - 1;
    }
    void add_edge(int a, int b, double w) {
        adj[a].push_back({b, w});
        adj[b].push_back({a, w});
    }
};

struct PathResult {
    double dist = kInf;
    std::vector<int> nodes;
};

PathResult dijkstra_path(const DistGraph& g, int s, int t) {
    std::vector<double> dist(g.adj.size(), kInf);
    std::vector<int> parent(g.adj.size(), -1);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    dist[s] = 0;
    pq.push({0, s});
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d > dist[u]) continue;
        if (u == t) break;
        for (auto [v, w] : g.adj[u])
            if (d + w < dist[v]) {
                dist[v] = d + w;
                parent[v] = u;
                pq.push({dist[v], v});
            }
    }
    PathResult r;
    r.dist = dist[t];
    if (r.dist == kInf) return r;
    for (int u = t; u != -1; u = parent[u]) r.nodes.push_back(u);
    std::reverse(r.nodes.begin(), r.nodes.end());
    return r;
}

struct NodeInfo {
    ChartPoint p;
};

struct LevelGraph {
    DistGraph g;
    std::vector<NodeInfo> info;
    ChartGrid near_grid, far_grid;
};

void build_chart_lattice(const ConformalChartMetric& m, const ChartView& view, bool far,
                         Vec2 lo, Vec2 hi, double h, LevelGraph& out, ChartGrid& grid,
                         double keep_radius) {
    grid.lo = lo;
    grid.h = h;
    grid.nx = static_cast<int>(std::floor((hi.x - lo.x) / h + 1e-9)) + 1;
    grid.ny = static_cast<int>(std::floor((hi.y - lo.y) / h + 1e-9)) + 1;
    grid.node_id.assign(static_cast<size_t>(grid.nx) * grid.ny, -1);
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            Vec2 p = grid.pos(i, j);
            if (keep_radius > 0.0 && p.norm() > keep_radius) continue;
            if (!far && m.annulus_outer > 0.0) {
                const double r = p.norm();
                if (r <= m.annulus_inner || r >= m.annulus_outer) continue;
            }
            // Nodes on a singular point are excluded; paths approach atoms
            // through their neighbors and queries attach them exactly.
            bool drop = false;
            for (const auto& sp : *view.points)
                if ((sp.pos - p).norm() < 1e-12) drop = true;
            if (drop) continue;
            const int id = out.g.add_node();
            out.info.push_back({ChartPoint{p, far}});
            grid.node_id[static_cast<size_t>(j) * grid.nx + i] = id;
        }
}

void connect_lattice(const ChartView& view, const ChartGrid& grid, double h, LevelGraph& out) {
    // 8-connected plus knight moves (16-neighbor stencil).
    static const int offsets[][2] = {{1, 0},  {0, 1}, {1, 1},  {1, -1},
                                     {1, 2},  {2, 1}, {2, -1}, {1, -2}};
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            const int a = grid.id(i, j);
            if (a < 0) continue;
            for (auto& o : offsets) {
                const int b = grid.id(i + o[0], j + o[1]);
                if (b < 0) continue;
                out.g.add_edge(a, b, segment_weight(view, out.info[a].p.z, out.info[b].p.z, h));
            }
        }
}

int attach_query(const ConformalChartMetric& m, LevelGraph& lg, ChartPoint q, double h) {
    const ChartView view = q.far_chart ? far_view(m) : near_view(m);
    const ChartGrid& grid = q.far_chart ? lg.far_grid : lg.near_grid;
    const int node = lg.g.add_node();
    lg.info.push_back({q});
    const int ci = static_cast<int>(std::round((q.z.x - grid.lo.x) / h));
    const int cj = static_cast<int>(std::round((q.z.y - grid.lo.y) / h));
    int attached = 0;
    for (int dj = -3; dj <= 3; ++dj)
        for (int di = -3; di <= 3; ++di) {
            const int b = grid.id(ci + di, cj + dj);
            if (b < 0) continue;
            const Vec2 bp = lg.info[b].p.z;
            if ((bp - q.z).norm() > 2.6 * h) continue;
            lg.g.add_edge(node, b, segment_weight(view, q.z, bp, h));
            ++attached;
        }
    require(attached > 0, Err::PointOutsideDomain, "query point not covered by the grid");
    return node;
}

ChartPoint canonicalize(const ConformalChartMetric& m, ChartPoint p) {
    if (m.two_chart && p.z.norm() > 1.0 + 1e-12) {
        p = {invert(p.z), !p.far_chart};
    }
    const ChartView view = p.far_chart ? far_view(m) : near_view(m);
    if (const auto* sp = singular_at(view, p.z, 1e-12)) {
        require(!sp->cusp, Err::SingularEndpoint,
                "query point is a cusp (" + sp->label + "), at infinite distance");
        p.z = sp->pos;
    }
    if (!m.two_chart) {
        require(!p.far_chart, Err::PointOutsideDomain, "metric has a single chart");
        if (!m.unbounded)
            require(p.z.x >= m.box_lo.x - 1e-9 && p.z.x <= m.box_hi.x + 1e-9 &&
                        p.z.y >= m.box_lo.y - 1e-9 && p.z.y <= m.box_hi.y + 1e-9,
                    Err::PointOutsideDomain, "point outside the chart box");
        if (m.annulus_outer > 0.0) {
            const double r = p.z.norm();
            require(r > m.annulus_inner && r < m.annulus_outer, Err::PointOutsideDomain,
                    "point outside the annulus domain");
        }
    }
    return p;
}

bool chart_point_less(const ChartPoint& a, const ChartPoint& b) {
    if (a.far_chart != b.far_chart) return !a.far_chart;
    if (a.z.x != b.z.x) return a.z.x < b.z.x;
    return a.z.y < b.z.y;
}

// Greedy shortcutting within same-chart runs of the path; keeps the result an
// upper bound while removing the lattice direction bias.
double shortcut_length(const ConformalChartMetric& m, const LevelGraph& lg,
                       const PathResult& path, double h) {
    if (path.nodes.size() < 2) return path.dist;
    // Per-step weights.
    std::vector<double> w(path.nodes.size() - 1, 0.0);
    for (size_t i = 0; i + 1 < path.nodes.size(); ++i) {
        const int a = path.nodes[i], b = path.nodes[i + 1];
        double found = kInf;
        for (auto [v, ww] : lg.g.adj[a])
            if (v == b) found = std::min(found, ww);
        w[i] = found;
    }
    NeumaierSum total;
    size_t i = 0;
    while (i + 1 < path.nodes.size()) {
        const ChartPoint pi = lg.info[path.nodes[i]].p;
        const ChartView view = pi.far_chart ? far_view(m) : near_view(m);
        double run = 0.0;
        size_t best_j = i + 1;
        double best_w = w[i];
        run = w[i];
        for (size_t j = i + 2; j < path.nodes.size(); ++j) {
            const ChartPoint pe = lg.info[path.nodes[j]].p;
            run += w[j - 1];
            if (pe.far_chart != pi.far_chart) break;
            const double direct = segment_weight(view, pi.z, pe.z, h);
            if (direct <= run + 1e-14) {
                best_j = j;
                best_w = direct;
                run = direct;
            }
        }
        total.add(best_w);
        i = best_j;
    }
    return std::min(path.dist, total.value());
}

double one_level(const ConformalChartMetric& m, ChartPoint a, ChartPoint b, double h) {
    LevelGraph lg;
    if (m.two_chart) {
        const double R = 1.15;
        build_chart_lattice(m, near_view(m), false, {-R, -R}, {R, R}, h, lg, lg.near_grid, R);
        build_chart_lattice(m, far_view(m), true, {-R, -R}, {R, R}, h, lg, lg.far_grid, R);
        connect_lattice(near_view(m), lg.near_grid, h, lg);
        connect_lattice(far_view(m), lg.far_grid, h, lg);
        // Seam edges across the overlap annulus.
        const int first_far = [&] {
            for (size_t k = 0; k < lg.info.size(); ++k)
                if (lg.info[k].p.far_chart) return static_cast<int>(k);
            return static_cast<int>(lg.info.size());
        }();
        for (int id = 0; id < first_far; ++id) {
            const Vec2 z = lg.info[id].p.z;
            const double r = z.norm();
            if (r < 0.9 || r > 1.12) continue;
            const Vec2 w0 = invert(z);
            const int ci = static_cast<int>(std::round((w0.x - lg.far_grid.lo.x) / h));
            const int cj = static_cast<int>(std::round((w0.y - lg.far_grid.lo.y) / h));
            for (int dj = -2; dj <= 2; ++dj)
                for (int di = -2; di <= 2; ++di) {
                    const int fid = lg.far_grid.id(ci + di, cj + dj);
                    if (fid < 0) continue;
                    const Vec2 wp = lg.info[fid].p.z;
                    if ((wp - w0).norm() > 1.9 * h) continue;
                    lg.g.add_edge(id, fid, segment_weight(far_view(m), w0, wp, h));
                }
        }
    } else {
        Vec2 lo = m.box_lo, hi = m.box_hi;
        if (m.unbounded) {
            lo = {std::min(a.z.x, b.z.x), std::min(a.z.y, b.z.y)};
            hi = {std::max(a.z.x, b.z.x), std::max(a.z.y, b.z.y)};
            const double extent = std::max({hi.x - lo.x, hi.y - lo.y, 1.0});
            const double margin = 0.4 * extent;
            lo = lo - Vec2{margin, margin};
            hi = hi + Vec2{margin, margin};
        }
        build_chart_lattice(m, near_view(m), false, lo, hi, h, lg, lg.near_grid, 0.0);
        connect_lattice(near_view(m), lg.near_grid, h, lg);
    }

    const int na = attach_query(m, lg, a, h);
    const int nb = attach_query(m, lg, b, h);
    PathResult path = dijkstra_path(lg.g, na, nb);
    require(path.dist < kInf, Err::DisconnectedPoint, "grid graph disconnected");
    return shortcut_length(m, lg, path, h);
}

}  // namespace

double conformal_distance(const ConformalChartMetric& m, ChartPoint a, ChartPoint b,
                          const ChartGridSpec& spec) {
    require(spec.spacing > 0.0 && spec.levels >= 0, Err::BadParameter, "bad grid spec");
    a = canonicalize(m, a);
    b = canonicalize(m, b);
    if (a.far_chart == b.far_chart && (a.z - b.z).norm() == 0.0) return 0.0;
    if (chart_point_less(b, a)) std::swap(a, b);  // order-independent result
    double best = kInf;
    for (int lev = 0; lev <= spec.levels; ++lev) {
        const double h = spec.spacing / static_cast<double>(1 << lev);
        best = std::min(best, one_level(m, a, b, h));
    }
    return best;
}

double geodesic_circle_length(const ConformalChartMetric& m, Vec2 center, double radius,
                              int n_rays, const std::optional<double>& ray_spacing) {
    require(n_rays >= 8, Err::BadParameter, "need at least 8 rays");
    require(radius > 0.0, Err::BadParameter, "radius must be positive");
    const ChartView view = near_view(m);
    const SingularPointDecl* sp = singular_at(view, center, 1e-12);
    require(!(sp && sp->cusp), Err::SingularEndpoint, "circle center is a cusp");

    // Local injectivity heuristic: stay away from the other singular features.
    double clearance = kInf;
    for (const auto& other : *view.points)
        if (!sp || (other.pos - center).norm() > 1e-12)
            clearance = std::min(clearance, (other.pos - center).norm());
    for (const auto& circ : *view.circles)
        clearance = std::min(clearance, std::abs(center.norm() - circ.radius));

    const double h = ray_spacing.value_or(0.02);
    const double alpha = sp ? sp->exponent : 0.0;

    std::vector<Vec2> pts;
    double max_chart_r = 0.0;
    for (int k = 0; k < n_rays; ++k) {
        const double phi = kTwoPi * k / n_rays;
        const Vec2 dir{std::cos(phi), std::sin(phi)};
        auto radial = [&](double t) {
            auto f = [&](double s) { return view.sqrt_rho(center + dir * s); };
            return gauss3_power_endpoint(f, t, alpha, 48);
        };
        double t_hi = 1e-6;
        while (radial(t_hi) < radius && t_hi < 1e6) t_hi *= 2.0;
        require(t_hi < 1e6, Err::RadiusTooLarge, "radius not reached along ray");
        const double t = solve_increasing(radial, 0.0, t_hi, radius, 60);
        max_chart_r = std::max(max_chart_r, t);
        pts.push_back(center + dir * t);
    }
    require(max_chart_r <= 0.25 * clearance, Err::RadiusTooLarge,
            "metric circle too close to another singular feature");

    NeumaierSum len;
    for (int k = 0; k < n_rays; ++k)
        len.add(segment_weight(view, pts[k], pts[(k + 1) % n_rays], h));
    return len.value();
}

// ---------------------------------------------------------------------------
// Gallery
// ---------------------------------------------------------------------------

ExampleKind example_kind_from_name(const std::string& name) {
    if (name == "cone") return ExampleKind::Cone;
    if (name == "hemisphere_cylinder") return ExampleKind::HemisphereCylinder;
    if (name == "glued_disks") return ExampleKind::GluedDisks;
    if (name == "pseudosphere") return ExampleKind::Pseudosphere;
    fail(Err::BadParameter, "unknown gallery entry: " + name);
}

ConformalChartMetric make_example_metric(ExampleKind kind, double theta) {
    ConformalChartMetric m;
    switch (kind) {
        case ExampleKind::Cone: {
            require(theta > 0.0, Err::BadParameter, "cone angle must be positive");
            const double beta = theta / kTwoPi - 1.0;
            m.name = "cone";
            m.rho_near = [beta](Vec2 z) { return std::pow(z.squared_norm(), beta); };
            m.unbounded = true;
            m.box_lo = {-2, -2};
            m.box_hi = {2, 2};
            if (std::abs(beta) > 1e-15) {
                m.singular_points_near.push_back({{0, 0}, beta, false, "apex"});
                m.declared.atoms.push_back({"apex", -kTwoPi * beta});
            }
            m.documented_total = -kTwoPi * beta;
            m.notes = "euclidean cone of angle theta; curvature atom 2pi - theta at the apex";
            return m;
        }
        case ExampleKind::HemisphereCylinder: {
            m.name = "hemisphere_cylinder";
            m.two_chart = true;
            m.rho_near = [](Vec2 z) {
                const double r2 = z.squared_norm();
                if (r2 <= 1.0) {
                    const double t = 1.0 + r2;
                    return 4.0 / (t * t);
                }
                return 1.0 / r2;
            };
            m.rho_far = [](Vec2 w) {
                const double r2 = w.squared_norm();
                if (r2 >= 1.0) {
                    const double t = 1.0 + r2;
                    return 4.0 / (t * t);
                }
                return 1.0 / r2;
            };
            m.singular_circles.push_back({1.0, "seam"});
            m.singular_points_far.push_back({{0, 0}, -1.0, true, "cylinder_end"});
            m.declared.faces.push_back({"hemisphere(|z|<1)", kTwoPi});
            m.documented_total = kTwoPi;
            m.notes =
                "unit hemisphere glued to a half-infinite cylinder; K = 1 inside the unit "
                "disk, 0 outside; the cylinder end sits at infinite distance";
            return m;
        }
        case ExampleKind::GluedDisks: {
            m.name = "glued_disks";
            m.two_chart = true;
            auto rho = [](Vec2 z) {
                const double r2 = z.squared_norm();
                return r2 <= 1.0 ? 1.0 : 1.0 / (r2 * r2);
            };
            m.rho_near = rho;
            m.rho_far = rho;
            m.singular_circles.push_back({1.0, "seam"});
            m.declared.edges.push_back({"|z|=1", 2.0, kTwoPi});
            m.documented_total = 4.0 * kPi;
            m.notes = "two euclidean unit disks glued along their boundary circles";
            return m;
        }
        case ExampleKind::Pseudosphere: {
            m.name = "pseudosphere";
            m.rho_near = [](Vec2 z) {
                const double r = z.norm();
                const double t = r * std::log(r);
                return 1.0 / (t * t);
            };
            m.box_lo = {-1, -1};
            m.box_hi = {1, 1};
            m.annulus_inner = 0.0;
            m.annulus_outer = 1.0;
            m.singular_points_near.push_back({{0, 0}, 0.0, true, "cusp"});
            // Restricted to the documented annulus cell [0.05, 0.5] plus the
            // cusp atom: dOmega = -dA + 2pi delta_0.
            const double r0 = 0.05, r1 = 0.5;
            const double area = kTwoPi * (1.0 / -std::log(r1) - 1.0 / -std::log(r0));
            m.declared.atoms.push_back({"cusp", kTwoPi});
            m.declared.faces.push_back({"annulus(0.05,0.5)", -area});
            m.documented_total = kTwoPi - area;
            m.notes =
                "beltrami pseudosphere model on 0<|z|<1; the origin is a cusp at infinite "
                "distance, distance queries to it are rejected; the area part is reported on "
                "the annulus cell [0.05, 0.5]";
            return m;
        }
    }
    fail(Err::BadParameter, "unknown gallery kind");
}

// ---------------------------------------------------------------------------
// Grid functions
// ---------------------------------------------------------------------------

GridFunction GridFunction::sample(const GridSpec& s, const std::function<double(Vec2)>& f) {
    GridFunction g(s);
    for (int j = 0; j < s.ny; ++j)
        for (int i = 0; i < s.nx; ++i) g.at(i, j) = f(g.pos(i, j));
    return g;
}

int GridFunction::masked_count() const {
    int n = 0;
    for (double v : values) n += std::isnan(v);
    return n;
}

GridFunction smooth_curvature_from_factor(const GridFunction& u, const GridFunction* K0_grid,
                                          double K0_const, double max_mask_fraction) {
    const GridSpec& s = u.spec;
    if (K0_grid)
        require(K0_grid->spec.nx == s.nx && K0_grid->spec.ny == s.ny, Err::BadParameter,
                "background curvature grid size mismatch");
    GridFunction out(s);
    const double h2 = s.h * s.h;
    int interior = 0, masked = 0;
    for (int j = 0; j < s.ny; ++j)
        for (int i = 0; i < s.nx; ++i) {
            auto wrap = [&](int a, int n) { return ((a % n) + n) % n; };
            double uc = u.at(i, j), ue, uw, un, us;
            bool structural = false;
            if (s.periodic) {
                ue = u.at(wrap(i + 1, s.nx), j);
                uw = u.at(wrap(i - 1, s.nx), j);
                un = u.at(i, wrap(j + 1, s.ny));
                us = u.at(i, wrap(j - 1, s.ny));
            } else if (i == 0 || j == 0 || i == s.nx - 1 || j == s.ny - 1) {
                out.at(i, j) = std::numeric_limits<double>::quiet_NaN();
                structural = true;
                ue = uw = un = us = 0;
            } else {
                ue = u.at(i + 1, j);
                uw = u.at(i - 1, j);
                un = u.at(i, j + 1);
                us = u.at(i, j - 1);
            }
            if (structural) continue;
            ++interior;
            if (std::isnan(uc) || std::isnan(ue) || std::isnan(uw) || std::isnan(un) ||
                std::isnan(us)) {
                out.at(i, j) = std::numeric_limits<double>::quiet_NaN();
                ++masked;
                continue;
            }
            const double lap = -(ue + uw + un + us - 4.0 * uc) / h2;
            const double k0 = K0_grid ? K0_grid->at(i, j) : K0_const;
            out.at(i, j) = std::exp(-2.0 * uc) * (k0 + lap);
        }
    require(interior > 0, Err::BadParameter, "grid too small");
    require(masked <= max_mask_fraction * interior, Err::MaskTooLarge,
            "more than the allowed fraction of nodes is masked");
    return out;
}

}  // namespace alx
