#include "alx/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <queue>

#include "alx/quadrature.hpp"

namespace alx {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

// ---------------------------------------------------------------------------
// Background geometry
// ---------------------------------------------------------------------------

Vec2 torus_wrap(Vec2 v) {
    v.x -= std::floor(v.x);
    v.y -= std::floor(v.y);
    return v;
}

Vec2 torus_delta(Vec2 x, Vec2 y) {
    Vec2 d = {x.x - y.x, x.y - y.y};
    d.x -= std::round(d.x);
    d.y -= std::round(d.y);
    return d;
}

double torus_distance(Vec2 x, Vec2 y) { return torus_delta(x, y).norm(); }

double sphere_distance(Vec3 x, Vec3 y) {
    // 2 asin(half-chord): accurate near 0 and pi.
    const double half_chord = 0.5 * (x - y).norm();
    return 2.0 * std::asin(std::clamp(half_chord, 0.0, 1.0));
}

double Background::distance(Vec3 x, Vec3 y) const {
    return is_sphere() ? sphere_distance(x, y) : torus_distance({x.x, x.y}, {y.x, y.y});
}

// ---------------------------------------------------------------------------
// Green functions
// ---------------------------------------------------------------------------

double green_sphere(Vec3 x, Vec3 y) {
    const double d = sphere_distance(x, y);
    require(d > 1e-14, Err::CoincidentPoints, "green_sphere needs x != y");
    // The additive constant -1/(4*pi) makes the spherical mean vanish:
    // the mean of ln sin(d/2) over the sphere is -1/2.
    return -(std::log(std::sin(0.5 * d)) + 0.5) / kTwoPi;
}

namespace {

// Heat-kernel split of the dual-lattice series at time T: the real-space part
// sums E1(|v - n|^2 / 4T)/4pi, the Fourier part decays like e^{-4 pi^2 |k|^2 T},
// and the constant -T restores the zero mean exactly.
constexpr double kEwaldT = 1.0 / (4.0 * kPi);
constexpr int kRealCut = 4;     // |v - n| <= ~3.8 keeps E1 arguments >= 45
constexpr int kFourierCut = 4;  // e^{-pi |k|^2} below 1e-19 past |k|^2 = 14

}  // namespace

double green_torus(Vec2 x, Vec2 y) {
    const Vec2 v = torus_delta(x, y);
    require(v.norm() > 1e-14, Err::CoincidentPoints, "green_torus needs x != y");

    NeumaierSum sum;
    for (int nx = -kRealCut; nx <= kRealCut; ++nx)
        for (int ny = -kRealCut; ny <= kRealCut; ++ny) {
            const double dx = v.x - nx, dy = v.y - ny;
            const double r2 = dx * dx + dy * dy;
            const double arg = r2 / (4.0 * kEwaldT);
            if (arg > 45.0) continue;  // E1 < 3e-22
            sum.add(expint_e1(arg) / (4.0 * kPi));
        }
    for (int kx = -kFourierCut; kx <= kFourierCut; ++kx)
        for (int ky = -kFourierCut; ky <= kFourierCut; ++ky) {
            if (kx == 0 && ky == 0) continue;
            const double k2 = static_cast<double>(kx) * kx + static_cast<double>(ky) * ky;
            const double damp = std::exp(-4.0 * kPi * kPi * k2 * kEwaldT);
            if (damp < 1e-19) continue;
            sum.add(std::cos(kTwoPi * (kx * v.x + ky * v.y)) * damp / (4.0 * kPi * kPi * k2));
        }
    sum.add(-kEwaldT);
    return sum.value();
}

double green_function(const Background& bg, Vec3 x, Vec3 y) {
    return bg.is_sphere() ? green_sphere(x, y) : green_torus({x.x, x.y}, {y.x, y.y});
}

// ---------------------------------------------------------------------------
// Icosphere
// ---------------------------------------------------------------------------

double spherical_triangle_area(Vec3 a, Vec3 b, Vec3 c) {
    const double num = std::abs(a.dot(b.cross(c)));
    const double den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
    return 2.0 * std::atan2(num, den);
}

namespace {

Icosphere build_icosphere(int level) {
    Icosphere ico;
    ico.level = level;
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> v = {
        {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
        {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
        {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1},
    };
    for (Vec3& p : v) p = p.normalized();
    std::vector<std::array<int, 3>> f = {
        {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
        {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
        {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1},
    };

    for (int l = 0; l < level; ++l) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            const auto key = std::minmax(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            const int id = static_cast<int>(v.size());
            v.push_back((v[a] + v[b]).normalized());
            midpoint[key] = id;
            return id;
        };
        std::vector<std::array<int, 3>> nf;
        nf.reserve(4 * f.size());
        for (const auto& tri : f) {
            const int ab = mid(tri[0], tri[1]);
            const int bc = mid(tri[1], tri[2]);
            const int ca = mid(tri[2], tri[0]);
            nf.push_back({tri[0], ab, ca});
            nf.push_back({tri[1], bc, ab});
            nf.push_back({tri[2], ca, bc});
            nf.push_back({ab, bc, ca});
        }
        f = std::move(nf);
    }

    ico.verts = std::move(v);
    ico.faces = std::move(f);
    ico.centroids.reserve(ico.faces.size());
    ico.face_areas.reserve(ico.faces.size());
    ico.neighbors.assign(ico.verts.size(), {});
    for (const auto& tri : ico.faces) {
        const Vec3 a = ico.verts[tri[0]], b = ico.verts[tri[1]], c = ico.verts[tri[2]];
        ico.centroids.push_back(((a + b + c) / 3.0).normalized());
        ico.face_areas.push_back(spherical_triangle_area(a, b, c));
        for (int i = 0; i < 3; ++i) {
            const int p = tri[i], q = tri[(i + 1) % 3];
            auto& np = ico.neighbors[p];
            if (std::find(np.begin(), np.end(), q) == np.end()) np.push_back(q);
            auto& nq = ico.neighbors[q];
            if (std::find(nq.begin(), nq.end(), p) == nq.end()) nq.push_back(p);
        }
    }
    return ico;
}

}  // namespace

const Icosphere& icosphere_cached(int level) {
    require(level >= 0 && level <= 8, Err::BadParameter, "icosphere level out of range");
    static std::map<int, Icosphere> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(level);
    if (it == cache.end()) it = cache.emplace(level, build_icosphere(level)).first;
    return it->second;
}

BgQuadrature background_quadrature(const Background& bg, int resolution) {
    BgQuadrature q;
    if (bg.is_sphere()) {
        const Icosphere& ico = icosphere_cached(resolution);
        q.centers = ico.centroids;
        q.weights = ico.face_areas;
        q.cell_scale = 2.2 / std::sqrt(static_cast<double>(ico.faces.size()));
    } else {
        require(resolution >= 2, Err::BadParameter, "torus grid too coarse");
        const double h = 1.0 / resolution;
        q.centers.reserve(static_cast<size_t>(resolution) * resolution);
        for (int j = 0; j < resolution; ++j)
            for (int i = 0; i < resolution; ++i)
                q.centers.push_back({(i + 0.5) * h, (j + 0.5) * h, 0.0});
        q.weights.assign(q.centers.size(), h * h);
        q.cell_scale = h;
    }
    return q;
}

namespace {

double near_any(const Background& bg, Vec3 p, const std::vector<Vec3>& pts) {
    double best = kInf;
    for (const Vec3& q : pts) best = std::min(best, bg.distance(p, q));
    return best;
}

double refine_sphere_cell(const Background& bg, Vec3 a, Vec3 b, Vec3 c,
                          const std::function<double(Vec3)>& f,
                          const std::vector<Vec3>& refine_near, int depth, double near_scale) {
    const Vec3 ctr = ((a + b + c) / 3.0).normalized();
    const bool split = depth > 0 && !refine_near.empty() &&
                       near_any(bg, ctr, refine_near) < near_scale;
    if (!split) return f(ctr) * spherical_triangle_area(a, b, c);
    const Vec3 ab = (a + b).normalized();
    const Vec3 bc = (b + c).normalized();
    const Vec3 ca = (c + a).normalized();
    return refine_sphere_cell(bg, a, ab, ca, f, refine_near, depth - 1, near_scale * 0.5) +
           refine_sphere_cell(bg, b, bc, ab, f, refine_near, depth - 1, near_scale * 0.5) +
           refine_sphere_cell(bg, c, ca, bc, f, refine_near, depth - 1, near_scale * 0.5) +
           refine_sphere_cell(bg, ab, bc, ca, f, refine_near, depth - 1, near_scale * 0.5);
}

double refine_torus_cell(const Background& bg, Vec2 center, double h,
                         const std::function<double(Vec3)>& f,
                         const std::vector<Vec3>& refine_near, int depth, double near_scale) {
    const Vec3 ctr{center.x, center.y, 0.0};
    const bool split =
        depth > 0 && !refine_near.empty() && near_any(bg, ctr, refine_near) < near_scale;
    if (!split) {
        // 2x2 tensor Gauss leaf: degree 3, so non-uniform cell sizes from the
        // refinement do not reintroduce an h^2 bias.
        const double off = 0.5 * h / std::sqrt(3.0);
        double sum = 0.0;
        for (int sx = -1; sx <= 1; sx += 2)
            for (int sy = -1; sy <= 1; sy += 2)
                sum += f({center.x + sx * off, center.y + sy * off, 0.0});
        return 0.25 * sum * h * h;
    }
    const double q = h / 4.0;
    double sum = 0.0;
    for (int sx = -1; sx <= 1; sx += 2)
        for (int sy = -1; sy <= 1; sy += 2)
            sum += refine_torus_cell(bg, {center.x + sx * q, center.y + sy * q}, h / 2.0, f,
                                     refine_near, depth - 1, near_scale * 0.5);
    return sum;
}

}  // namespace

double integrate_background(const Background& bg, int resolution,
                            const std::function<double(Vec3)>& f,
                            const std::vector<Vec3>& refine_near, int refine_depth) {
    NeumaierSum sum;
    if (bg.is_sphere()) {
        const Icosphere& ico = icosphere_cached(resolution);
        const double near_scale = 6.0 * 2.2 / std::sqrt(static_cast<double>(ico.faces.size()));
        for (const auto& tri : ico.faces)
            sum.add(refine_sphere_cell(bg, ico.verts[tri[0]], ico.verts[tri[1]],
                                       ico.verts[tri[2]], f, refine_near, refine_depth,
                                       near_scale));
    } else {
        const double h = 1.0 / resolution;
        const double near_scale = 6.0 * h;
        for (int j = 0; j < resolution; ++j)
            for (int i = 0; i < resolution; ++i)
                sum.add(refine_torus_cell(bg, {(i + 0.5) * h, (j + 0.5) * h}, h, f, refine_near,
                                          refine_depth, near_scale));
    }
    return sum.value();
}

// ---------------------------------------------------------------------------
// Prescribed measures
// ---------------------------------------------------------------------------

double PrescribedMeasure::smooth_mass() const {
    switch (smooth.kind) {
        case SmoothPart::Kind::Zero:
            return 0.0;
        case SmoothPart::Kind::Uniform:
            return smooth.uniform_density * background.area();
        case SmoothPart::Kind::Grid: {
            const BgQuadrature q = background_quadrature(background, smooth.resolution);
            require(q.centers.size() == smooth.cell_density.size(), Err::BadParameter,
                    "smooth grid size mismatch");
            NeumaierSum s;
            for (size_t i = 0; i < q.centers.size(); ++i)
                s.add(smooth.cell_density[i] * q.weights[i]);
            return s.value();
        }
    }
    return 0.0;
}

double PrescribedMeasure::total_mass() const {
    NeumaierSum s;
    for (const auto& a : atoms) s.add(a.mass);
    s.add(smooth_mass());
    return s.value();
}

double PrescribedMeasure::max_atom_mass() const {
    double m = -kInf;
    for (const auto& a : atoms) m = std::max(m, a.mass);
    return atoms.empty() ? 0.0 : m;
}

double PrescribedMeasure::integrate(const std::function<double(Vec3)>& f,
                                    int uniform_resolution) const {
    NeumaierSum s;
    for (const auto& a : atoms) s.add(a.mass * f(a.site));
    switch (smooth.kind) {
        case SmoothPart::Kind::Zero:
            break;
        case SmoothPart::Kind::Uniform: {
            const int res = uniform_resolution > 0 ? uniform_resolution
                                                   : (background.is_sphere() ? 5 : 256);
            const BgQuadrature q = background_quadrature(background, res);
            for (size_t i = 0; i < q.centers.size(); ++i)
                s.add(smooth.uniform_density * q.weights[i] * f(q.centers[i]));
            break;
        }
        case SmoothPart::Kind::Grid: {
            const BgQuadrature q = background_quadrature(background, smooth.resolution);
            require(q.centers.size() == smooth.cell_density.size(), Err::BadParameter,
                    "smooth grid size mismatch");
            for (size_t i = 0; i < q.centers.size(); ++i)
                s.add(smooth.cell_density[i] * q.weights[i] * f(q.centers[i]));
            break;
        }
    }
    return s.value();
}

// ---------------------------------------------------------------------------
// Potentials
// ---------------------------------------------------------------------------

double PotentialFunction::operator()(Vec3 x) const {
    NeumaierSum s;
    for (const auto& a : kernel_atoms) s.add(a.mass * green_function(background, x, a.site));
    for (size_t i = 0; i < cell_centers.size(); ++i)
        s.add(cell_masses[i] * green_function(background, x, cell_centers[i]));
    return s.value() + offset;
}

PotentialFunction potential_of_measure(const Background& bg, const PrescribedMeasure& mu) {
    require(mu.background.kind == bg.kind, Err::BadParameter, "background mismatch");
    require(std::abs(mu.total_mass()) <= 1e-10, Err::NonZeroTotalMass,
            "potential needs a measure of zero total mass");
    for (const auto& a : mu.atoms)
        require(a.mass < kTwoPi - 1e-12, Err::CuspAtom,
                "atom of mass >= 2*pi is a cusp and is rejected");

    PotentialFunction u;
    u.background = bg;
    u.kernel_atoms = mu.atoms;
    // The uniform smooth part has zero potential (property (d)); grid parts
    // convolve against the quadrature cells.
    if (mu.smooth.kind == SmoothPart::Kind::Grid) {
        const BgQuadrature q = background_quadrature(bg, mu.smooth.resolution);
        require(q.centers.size() == mu.smooth.cell_density.size(), Err::BadParameter,
                "smooth grid size mismatch");
        for (size_t i = 0; i < q.centers.size(); ++i) {
            const double mass = mu.smooth.cell_density[i] * q.weights[i];
            if (std::abs(mass) > 1e-16) {
                u.cell_centers.push_back(q.centers[i]);
                u.cell_masses.push_back(mass);
            }
        }
    }
    return u;
}

SingularMetric build_alexandrov_metric(const Background& bg, const PrescribedMeasure& omega) {
    require(omega.background.kind == bg.kind, Err::BadParameter, "background mismatch");
    const double target = kTwoPi * bg.euler_characteristic();
    require(std::abs(omega.total_mass() - target) <= 1e-8, Err::GaussBonnetViolation,
            "total curvature must equal 2*pi*chi of the background");
    for (const auto& a : omega.atoms)
        require(a.mass < kTwoPi - 1e-12, Err::CuspAtom,
                "curvature atom of mass >= 2*pi is a cusp");

    // mu = omega - K_h dA_h.
    PrescribedMeasure mu = omega;
    if (bg.is_sphere()) {
        switch (mu.smooth.kind) {
            case SmoothPart::Kind::Zero:
                mu.smooth = SmoothPart::uniform(-1.0);
                break;
            case SmoothPart::Kind::Uniform:
                mu.smooth.uniform_density -= 1.0;
                break;
            case SmoothPart::Kind::Grid:
                for (double& d : mu.smooth.cell_density) d -= 1.0;
                break;
        }
    }

    SingularMetric metric;
    metric.background = bg;
    metric.u = potential_of_measure(bg, mu);
    metric.curvature = omega;
    return metric;
}

// ---------------------------------------------------------------------------
// Distances in the singular metric
// ---------------------------------------------------------------------------

namespace {

struct WGraph {
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

double graph_distance(const WGraph& g, int s, int t) {
    std::vector<double> dist(g.adj.size(), kInf);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    dist[s] = 0;
    pq.push({0, s});
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d > dist[u]) continue;
        if (u == t) return d;
        for (auto [v, w] : g.adj[u])
            if (d + w < dist[v]) {
                dist[v] = d + w;
                pq.push({dist[v], v});
            }
    }
    return dist[t];
}

// Atom exponent of e^u at an atom site: e^u ~ C d^{-m/2pi}.
double atom_exponent(double mass) { return -mass / kTwoPi; }

const MeasureAtom* atom_at(const SingularMetric& m, Vec3 p, double tol) {
    for (const auto& a : m.u.kernel_atoms)
        if (m.background.distance(a.site, p) <= tol) return &a;
    return nullptr;
}

// --- torus ---

struct TorusLevel {
    int n = 0;
    std::vector<double> u_eval;  // (2n)^2 lattice, +-inf at atom sites
    double ueval(int i, int j) const {
        const int m = 2 * n;
        return u_eval[static_cast<size_t>(((j % m) + m) % m) * m + (((i % m) + m) % m)];
    }
};

TorusLevel build_torus_level(const SingularMetric& metric, int n) {
    TorusLevel lv;
    lv.n = n;
    const int m = 2 * n;
    // Green table over the (2n)x(2n) difference lattice.
    std::vector<double> gtab(static_cast<size_t>(m) * m, 0.0);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) {
            if (i == 0 && j == 0) {
                gtab[0] = kInf;
                continue;
            }
            gtab[static_cast<size_t>(j) * m + i] =
                green_torus({static_cast<double>(i) / m, static_cast<double>(j) / m}, {0, 0});
        }
    auto gdiff = [&](int di, int dj) {
        return gtab[static_cast<size_t>(((dj % m) + m) % m) * m + (((di % m) + m) % m)];
    };

    lv.u_eval.assign(static_cast<size_t>(m) * m, 0.0);
    // Cells sit on the half-offset lattice by construction; atoms may be
    // anywhere (lattice-aligned atoms use the table, others call the kernel).
    struct CellIdx {
        int i, j;
        double mass;
    };
    std::vector<CellIdx> cells;
    cells.reserve(metric.u.cell_centers.size());
    for (size_t c = 0; c < metric.u.cell_centers.size(); ++c) {
        const Vec3 p = metric.u.cell_centers[c];
        const double fi = p.x * m, fj = p.y * m;
        const int ii = static_cast<int>(std::lround(fi));
        const int jj = static_cast<int>(std::lround(fj));
        require(std::abs(fi - ii) < 1e-9 && std::abs(fj - jj) < 1e-9, Err::ResolutionTooLow,
                "smooth-part cells must sit on the evaluation lattice; use a node "
                "resolution that divides twice the smooth grid resolution");
        cells.push_back({ii, jj, metric.u.cell_masses[c]});
    }

    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) {
            const Vec2 p{static_cast<double>(i) / m, static_cast<double>(j) / m};
            NeumaierSum s;
            bool at_atom = false;
            double atom_sign = 0.0;
            for (const auto& a : metric.u.kernel_atoms) {
                const Vec2 site{a.site.x, a.site.y};
                if (torus_distance(p, site) <= 1e-12) {
                    at_atom = true;
                    atom_sign = a.mass;
                    continue;
                }
                const double fi = site.x * m, fj = site.y * m;
                const int si = static_cast<int>(std::lround(fi));
                const int sj = static_cast<int>(std::lround(fj));
                if (std::abs(fi - si) < 1e-12 && std::abs(fj - sj) < 1e-12)
                    s.add(a.mass * gdiff(i - si, j - sj));
                else
                    s.add(a.mass * green_torus(p, site));
            }
            for (const auto& c : cells) s.add(c.mass * gdiff(i - c.i, j - c.j));
            if (at_atom)
                lv.u_eval[static_cast<size_t>(j) * m + i] = atom_sign > 0 ? kInf : -kInf;
            else
                lv.u_eval[static_cast<size_t>(j) * m + i] = s.value() + metric.u.offset;
        }
    return lv;
}

double torus_level_distance(const SingularMetric& metric, Vec2 qa, Vec2 qb, int n) {
    const TorusLevel lv = build_torus_level(metric, n);
    const double h = 1.0 / n;

    WGraph g;
    std::vector<int> node_of(static_cast<size_t>(n) * n, -1);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            if (!std::isfinite(lv.ueval(2 * i, 2 * j))) continue;
            node_of[static_cast<size_t>(j) * n + i] = g.add_node();
        }
    auto node_at = [&](int i, int j) {
        return node_of[static_cast<size_t>(((j % n) + n) % n) * n + (((i % n) + n) % n)];
    };

    static const int offsets[][2] = {{1, 0},  {0, 1}, {1, 1},  {1, -1},
                                     {1, 2},  {2, 1}, {2, -1}, {1, -2}};
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const int a = node_at(i, j);
            if (a < 0) continue;
            for (const auto& o : offsets) {
                const int b = node_at(i + o[0], j + o[1]);
                if (b < 0) continue;
                const double u0 = lv.ueval(2 * i, 2 * j);
                const double u1 = lv.ueval(2 * (i + o[0]), 2 * (j + o[1]));
                const double um = lv.ueval(2 * i + o[0], 2 * j + o[1]);
                if (!std::isfinite(um)) continue;
                const double len = h * std::sqrt(static_cast<double>(o[0] * o[0] + o[1] * o[1]));
                const double w =
                    len / 6.0 * (std::exp(u0) + 4.0 * std::exp(um) + std::exp(u1));
                g.add_edge(a, b, w);
            }
        }

    // Query attachment. Straight connectors with direct kernel evaluation;
    // a query at an atom integrates with the power substitution.
    auto u_at = [&](Vec2 p) { return metric.u({p.x, p.y, 0.0}); };
    auto attach = [&](Vec2 q) {
        const int qi = static_cast<int>(std::lround(q.x * n));
        const int qj = static_cast<int>(std::lround(q.y * n));
        if (torus_distance(q, {static_cast<double>(((qi % n) + n) % n) * h,
                               static_cast<double>(((qj % n) + n) % n) * h}) < 1e-12) {
            const int id = node_at(qi, qj);
            if (id >= 0) return id;
        }
        const MeasureAtom* atom = atom_at(metric, {q.x, q.y, 0.0}, 1e-12);
        const int id = g.add_node();
        for (int dj = -3; dj <= 3; ++dj)
            for (int di = -3; di <= 3; ++di) {
                const int b = node_at(qi + di, qj + dj);
                if (b < 0) continue;
                const Vec2 bp{static_cast<double>(((qi + di) % n + n) % n) * h,
                              static_cast<double>(((qj + dj) % n + n) % n) * h};
                const Vec2 delta = torus_delta(bp, q);
                const double len = delta.norm();
                if (len > 2.6 * h || len < 1e-14) continue;
                double w;
                if (atom) {
                    auto f = [&](double s) {
                        const Vec2 p = torus_wrap({q.x + delta.x * (s / len),
                                                   q.y + delta.y * (s / len)});
                        return std::exp(u_at(p));
                    };
                    w = gauss3_power_endpoint(f, len, atom_exponent(atom->mass), 48);
                } else {
                    auto f = [&](double s) {
                        const Vec2 p = torus_wrap({q.x + delta.x * (s / len),
                                                   q.y + delta.y * (s / len)});
                        return std::exp(u_at(p));
                    };
                    w = gauss3_composite(f, 0.0, len, 4);
                }
                g.add_edge(id, b, w);
            }
        require(!g.adj[id].empty(), Err::ResolutionTooLow, "query not covered by the lattice");
        return id;
    };

    const int na = attach(qa);
    const int nb = attach(qb);
    if (na == nb) return 0.0;
    double best = graph_distance(g, na, nb);
    require(best < kInf, Err::DisconnectedPoint, "torus lattice disconnected");

    // Direct straight-chord candidate (all wraps), skipped near positive atoms.
    for (int wx = -1; wx <= 1; ++wx)
        for (int wy = -1; wy <= 1; ++wy) {
            const Vec2 lift{qb.x - qa.x + wx, qb.y - qa.y + wy};
            const double len = lift.norm();
            if (len < 1e-14 || len > 1.6) continue;
            bool near_pos_atom = false;
            const MeasureAtom* enda = atom_at(metric, {qa.x, qa.y, 0.0}, 1e-12);
            const MeasureAtom* endb = atom_at(metric, {qb.x, qb.y, 0.0}, 1e-12);
            for (const auto& a : metric.u.kernel_atoms) {
                if (a.mass <= 0.0) continue;
                // distance from the segment to the atom (in the lift, all wraps)
                for (int ax = -1; ax <= 2; ++ax)
                    for (int ay = -1; ay <= 2; ++ay) {
                        const Vec2 site{a.site.x + ax, a.site.y + ay};
                        const Vec2 rel = site - qa;
                        const double t =
                            std::clamp(rel.dot(lift) / lift.squared_norm(), 0.0, 1.0);
                        const Vec2 foot{qa.x + lift.x * t, qa.y + lift.y * t};
                        const bool is_endpoint =
                            (enda && t < 1e-9) || (endb && t > 1.0 - 1e-9);
                        if (!is_endpoint && (foot - site).norm() < 2.0 * h)
                            near_pos_atom = true;
                    }
            }
            if (near_pos_atom) continue;
            auto f = [&](double s) {
                const Vec2 p =
                    torus_wrap({qa.x + lift.x * (s / len), qa.y + lift.y * (s / len)});
                return std::exp(u_at(p));
            };
            double w;
            if (enda && !endb) {
                w = gauss3_power_endpoint(f, len, atom_exponent(enda->mass), 64);
            } else if (endb && !enda) {
                auto rf = [&](double s) {
                    const Vec2 p = torus_wrap(
                        {qb.x - lift.x * (s / len), qb.y - lift.y * (s / len)});
                    return std::exp(u_at(p));
                };
                w = gauss3_power_endpoint(rf, len, atom_exponent(endb->mass), 64);
            } else if (!enda && !endb) {
                w = gauss3_composite(f, 0.0, len, 32);
            } else {
                continue;
            }
            best = std::min(best, w);
        }
    return best;
}

// --- sphere ---

Vec3 slerp(Vec3 a, Vec3 b, double t) {
    const double ang = sphere_distance(a, b);
    if (ang < 1e-14) return a;
    Vec3 n = b - a * a.dot(b);
    double nn = n.norm();
    if (nn < 1e-12) {  // antipodal: walk a deterministic meridian
        const Vec3 up = std::abs(a.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
        n = a.cross(up);
        nn = n.norm();
    }
    n = n / nn;
    return (a * std::cos(t * ang) + n * std::sin(t * ang)).normalized();
}

double arc_weight(const PotentialFunction& u, Vec3 a, Vec3 b, int panels) {
    const double ang = sphere_distance(a, b);
    if (ang < 1e-15) return 0.0;
    auto f = [&](double s) { return std::exp(u(slerp(a, b, s / ang))); };
    return gauss3_composite(f, 0.0, ang, panels);
}

double sphere_level_distance(const SingularMetric& metric, Vec3 qa, Vec3 qb, int level) {
    const Icosphere& ico = icosphere_cached(level);
    const PotentialFunction& u = metric.u;

    // Vertex ids of excluded (atom) nodes.
    std::vector<int> node_of(ico.verts.size(), -1);
    WGraph g;
    for (size_t v = 0; v < ico.verts.size(); ++v) {
        if (atom_at(metric, ico.verts[v], 1e-12)) continue;
        node_of[v] = g.add_node();
    }
    std::vector<double> u_vert(ico.verts.size(), 0.0);
    for (size_t v = 0; v < ico.verts.size(); ++v)
        if (node_of[v] >= 0) u_vert[v] = u(ico.verts[v]);

    // Neighborhood rings up to 3 hops.
    for (size_t v = 0; v < ico.verts.size(); ++v) {
        if (node_of[v] < 0) continue;
        std::vector<int> ring;
        std::vector<int> seen{static_cast<int>(v)};
        std::vector<int> frontier{static_cast<int>(v)};
        for (int hop = 0; hop < 3; ++hop) {
            std::vector<int> next;
            for (int p : frontier)
                for (int q : ico.neighbors[p])
                    if (std::find(seen.begin(), seen.end(), q) == seen.end()) {
                        seen.push_back(q);
                        next.push_back(q);
                        ring.push_back(q);
                    }
            frontier = std::move(next);
        }
        for (int w : ring) {
            if (static_cast<size_t>(w) <= v || node_of[w] < 0) continue;
            const Vec3 a = ico.verts[v], b = ico.verts[w];
            const double ang = sphere_distance(a, b);
            const double wgt =
                ang / 6.0 *
                (std::exp(u_vert[v]) + 4.0 * std::exp(u(slerp(a, b, 0.5))) +
                 std::exp(u_vert[w]));
            g.add_edge(node_of[v], node_of[w], wgt);
        }
    }

    const double hscale = 2.2 / std::sqrt(static_cast<double>(ico.faces.size()));
    auto attach = [&](Vec3 q) {
        for (size_t v = 0; v < ico.verts.size(); ++v)
            if (node_of[v] >= 0 && sphere_distance(q, ico.verts[v]) < 1e-12)
                return node_of[v];
        const MeasureAtom* atom = atom_at(metric, q, 1e-12);
        const int id = g.add_node();
        for (size_t v = 0; v < ico.verts.size(); ++v) {
            if (node_of[v] < 0) continue;
            const double ang = sphere_distance(q, ico.verts[v]);
            if (ang > 2.6 * hscale || ang < 1e-14) continue;
            double w;
            if (atom) {
                auto f = [&](double s) {
                    return std::exp(u(slerp(q, ico.verts[v], s / ang)));
                };
                w = gauss3_power_endpoint(f, ang, atom_exponent(atom->mass), 48);
            } else {
                w = arc_weight(u, q, ico.verts[v], 4);
            }
            g.add_edge(id, node_of[v], w);
        }
        require(!g.adj[id].empty(), Err::ResolutionTooLow, "query not covered by the icosphere");
        return id;
    };

    const int na = attach(qa);
    const int nb = attach(qb);
    if (na == nb) return 0.0;
    double best = graph_distance(g, na, nb);
    require(best < kInf, Err::DisconnectedPoint, "icosphere graph disconnected");

    // Direct great-circle candidate.
    const MeasureAtom* enda = atom_at(metric, qa, 1e-12);
    const MeasureAtom* endb = atom_at(metric, qb, 1e-12);
    const double ang = sphere_distance(qa, qb);
    if (ang > 1e-14 && ang < kPi - 1e-12) {
        bool near_pos_atom = false;
        for (const auto& a : metric.u.kernel_atoms) {
            if (a.mass <= 0.0) continue;
            constexpr int kProbe = 128;
            for (int k = 1; k < kProbe; ++k) {
                const Vec3 p = slerp(qa, qb, static_cast<double>(k) / kProbe);
                const double t = static_cast<double>(k) / kProbe;
                const bool endpoint_zone = (enda && t < 0.02) || (endb && t > 0.98);
                if (!endpoint_zone && sphere_distance(p, a.site) < 1.5 * hscale)
                    near_pos_atom = true;
            }
        }
        if (!near_pos_atom) {
            double w = kInf;
            if (enda && endb) {
                // split at the midpoint; both halves have one singular end
                const Vec3 mid = slerp(qa, qb, 0.5);
                auto fa = [&](double s) { return std::exp(u(slerp(qa, mid, s / (ang / 2)))); };
                auto fb = [&](double s) { return std::exp(u(slerp(qb, mid, s / (ang / 2)))); };
                w = gauss3_power_endpoint(fa, ang / 2, atom_exponent(enda->mass), 64) +
                    gauss3_power_endpoint(fb, ang / 2, atom_exponent(endb->mass), 64);
            } else if (enda) {
                auto f = [&](double s) { return std::exp(u(slerp(qa, qb, s / ang))); };
                w = gauss3_power_endpoint(f, ang, atom_exponent(enda->mass), 64);
            } else if (endb) {
                auto f = [&](double s) { return std::exp(u(slerp(qb, qa, s / ang))); };
                w = gauss3_power_endpoint(f, ang, atom_exponent(endb->mass), 64);
            } else {
                auto f = [&](double s) { return std::exp(u(slerp(qa, qb, s / ang))); };
                w = gauss3_composite(f, 0.0, ang, 48);
            }
            best = std::min(best, w);
        }
    }
    return best;
}

}  // namespace

double metric_distance(const SingularMetric& m, Vec3 x, Vec3 y, int resolution) {
    if (m.background.is_sphere()) {
        require(resolution >= 2, Err::ResolutionTooLow, "icosphere level must be >= 2");
        const Vec3 xs = x.normalized(), ys = y.normalized();
        double best = kInf;
        for (int lev = std::max(2, resolution - 2); lev <= resolution; ++lev)
            best = std::min(best, sphere_level_distance(m, xs, ys, lev));
        return best;
    }
    require(resolution >= 8, Err::ResolutionTooLow, "torus lattice must be >= 8");
    const Vec2 qa = torus_wrap({x.x, x.y});
    const Vec2 qb = torus_wrap({y.x, y.y});
    double best = kInf;
    std::vector<int> ladder;
    for (int n = resolution; n >= 8 && ladder.size() < 3; n /= 2) {
        ladder.push_back(n);
        if (n % 2 != 0) break;
    }
    for (int n : ladder) best = std::min(best, torus_level_distance(m, qa, qb, n));
    return best;
}

double geodesic_circle_length(const SingularMetric& m, Vec3 center, double radius, int n_rays) {
    require(n_rays >= 8, Err::BadParameter, "need at least 8 rays");
    require(radius > 0.0, Err::BadParameter, "radius must be positive");
    const bool sphere = m.background.is_sphere();
    const Vec3 c = sphere ? center.normalized() : Vec3{center.x, center.y, 0.0};
    const MeasureAtom* atom = atom_at(m, c, 1e-12);
    const double alpha = atom ? atom_exponent(atom->mass) : 0.0;

    // Clearance: radial metric distance toward the nearest other atom.
    double clearance = kInf;
    for (const auto& a : m.u.kernel_atoms) {
        if (m.background.distance(a.site, c) <= 1e-12) continue;
        const double bg_d = m.background.distance(a.site, c);
        double est;
        if (sphere) {
            auto f = [&](double s) { return std::exp(m.u(slerp(c, a.site, s / bg_d))); };
            est = gauss3_power_endpoint(f, bg_d * 0.999, alpha, 32);
        } else {
            const Vec2 cc{c.x, c.y};
            const Vec2 delta = torus_delta({a.site.x, a.site.y}, cc);
            auto f = [&](double s) {
                const Vec2 p = torus_wrap({cc.x + delta.x * (s / bg_d),
                                           cc.y + delta.y * (s / bg_d)});
                return std::exp(m.u({p.x, p.y, 0.0}));
            };
            est = gauss3_power_endpoint(f, bg_d * 0.999, alpha, 32);
        }
        clearance = std::min(clearance, est);
    }
    // Wraparound cap: radial metric length to half the background period.
    {
        const double bg_cap = sphere ? kPi / 2.0 : 0.5;
        for (int k = 0; k < 4; ++k) {
            const double phi = kTwoPi * k / 4.0 + 0.39;
            double est;
            if (sphere) {
                const Vec3 up = std::abs(c.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
                const Vec3 ee1 = c.cross(up).normalized();
                const Vec3 ee2 = c.cross(ee1).normalized();
                const Vec3 dir = ee1 * std::cos(phi) + ee2 * std::sin(phi);
                auto f = [&](double s) {
                    return std::exp(m.u((c * std::cos(s) + dir * std::sin(s)).normalized()));
                };
                est = gauss3_power_endpoint(f, bg_cap, alpha, 32);
            } else {
                const Vec2 cc{c.x, c.y};
                const Vec2 dir{std::cos(phi), std::sin(phi)};
                auto f = [&](double s) {
                    const Vec2 p = torus_wrap({cc.x + dir.x * s, cc.y + dir.y * s});
                    return std::exp(m.u({p.x, p.y, 0.0}));
                };
                est = gauss3_power_endpoint(f, bg_cap, alpha, 32);
            }
            clearance = std::min(clearance, est);
        }
    }
    require(radius <= 0.25 * clearance + 1e-15, Err::RadiusTooLarge,
            "radius above a quarter of the local clearance");

    // Radial probes.
    std::vector<Vec3> pts;
    Vec3 e1, e2;
    if (sphere) {
        const Vec3 up = std::abs(c.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
        e1 = c.cross(up).normalized();
        e2 = c.cross(e1).normalized();
    }
    for (int k = 0; k < n_rays; ++k) {
        const double phi = kTwoPi * k / n_rays;
        if (sphere) {
            const Vec3 dir = e1 * std::cos(phi) + e2 * std::sin(phi);
            auto radial = [&](double t) {
                auto f = [&](double s) {
                    const Vec3 p = (c * std::cos(s) + dir * std::sin(s)).normalized();
                    return std::exp(m.u(p));
                };
                return gauss3_power_endpoint(f, t, alpha, 32);
            };
            double t_hi = 1e-4;
            while (radial(t_hi) < radius && t_hi < kPi * 0.9) t_hi *= 1.7;
            require(t_hi < kPi * 0.9, Err::RadiusTooLarge, "radius reaches across the sphere");
            const double t = solve_increasing(radial, 0.0, t_hi, radius, 55);
            pts.push_back((c * std::cos(t) + dir * std::sin(t)).normalized());
        } else {
            const Vec2 cc{c.x, c.y};
            const Vec2 dir{std::cos(phi), std::sin(phi)};
            auto radial = [&](double t) {
                auto f = [&](double s) {
                    const Vec2 p = torus_wrap({cc.x + dir.x * s, cc.y + dir.y * s});
                    return std::exp(m.u({p.x, p.y, 0.0}));
                };
                return gauss3_power_endpoint(f, t, alpha, 32);
            };
            double t_hi = 1e-4;
            while (radial(t_hi) < radius && t_hi < 0.45) t_hi *= 1.7;
            require(t_hi < 0.45, Err::RadiusTooLarge, "radius reaches around the torus");
            const double t = solve_increasing(radial, 0.0, t_hi, radius, 55);
            const Vec2 p = torus_wrap({cc.x + dir.x * t, cc.y + dir.y * t});
            pts.push_back({p.x, p.y, 0.0});
        }
    }

    NeumaierSum len;
    for (int k = 0; k < n_rays; ++k) {
        const Vec3 a = pts[k], b = pts[(k + 1) % n_rays];
        if (sphere) {
            len.add(arc_weight(m.u, a, b, 6));
        } else {
            const Vec2 pa{a.x, a.y};
            const Vec2 delta = torus_delta({b.x, b.y}, pa);
            const double L = delta.norm();
            auto f = [&](double s) {
                const Vec2 p = torus_wrap({pa.x + delta.x * (s / L), pa.y + delta.y * (s / L)});
                return std::exp(m.u({p.x, p.y, 0.0}));
            };
            len.add(gauss3_composite(f, 0.0, L, 6));
        }
    }
    return len.value();
}

}  // namespace alx
