#include "alx/geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <string>

namespace alx {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Distance graph: surface vertices + dyadic Steiner nodes on edges, complete
// subgraph over the boundary nodes of each face, developed per face. Dyadic
// placement nests across levels, so refining can only shorten graph paths.
// ---------------------------------------------------------------------------

struct GraphEdge {
    int to;
    double w;
    int face;
};

struct NodeOnFace {
    int node;
    Vec2 pos;
};

struct DistanceGraph {
    int level = 0;
    int segments = 1;  // 2^level per edge
    int vertex_nodes = 0;
    std::vector<int> edge_index_of_slot;  // canonical slot -> edge index, else -1
    std::vector<int> canonical_slots;     // edge index -> canonical slot
    std::vector<std::vector<GraphEdge>> adj;
    std::vector<std::vector<NodeOnFace>> face_nodes;  // per face, with developed positions
    std::vector<int> node_edge;                       // per node: undirected edge slot or -1

    int node_count() const { return static_cast<int>(adj.size()); }
    int steiner_node(int edge_idx, int j) const {  // j in 1..segments-1
        return vertex_nodes + edge_idx * (segments - 1) + (j - 1);
    }
};

DistanceGraph build_graph(const ConeSurface& s, int level) {
    require(level >= 0, Err::BadParameter, "refinement level must be nonnegative");
    const Triangulation& t = s.topo();
    DistanceGraph g;
    g.level = level;
    g.segments = 1 << level;
    g.vertex_nodes = t.vertex_count();

    const int slots = 3 * t.face_count();
    g.edge_index_of_slot.assign(slots, -1);
    for (int slot = 0; slot < slots; ++slot)
        if (t.undirected_edge(slot) == slot) {
            g.edge_index_of_slot[slot] = static_cast<int>(g.canonical_slots.size());
            g.canonical_slots.push_back(slot);
        }

    const int steiner_per_edge = g.segments - 1;
    const int total =
        g.vertex_nodes + static_cast<int>(g.canonical_slots.size()) * steiner_per_edge;
    g.adj.assign(total, {});
    g.node_edge.assign(total, -1);
    for (size_t e = 0; e < g.canonical_slots.size(); ++e)
        for (int j = 1; j < g.segments; ++j)
            g.node_edge[g.steiner_node(static_cast<int>(e), j)] = g.canonical_slots[e];

    g.face_nodes.assign(t.face_count(), {});
    for (int f = 0; f < t.face_count(); ++f) {
        const auto dev = s.develop_face(f);
        auto& nodes = g.face_nodes[f];
        for (int i = 0; i < 3; ++i) nodes.push_back({t.vertex_at(f, i), dev[i]});
        for (int i = 0; i < 3; ++i) {
            const int slot = Triangulation::slot_id(f, i);
            const int canon = t.undirected_edge(slot);
            const int eidx = g.edge_index_of_slot[canon];
            const Vec2 a = dev[(i + 1) % 3];  // tail corner of this slot
            const Vec2 b = dev[(i + 2) % 3];
            for (int j = 1; j < g.segments; ++j) {
                const double tc = static_cast<double>(j) / g.segments;  // along canonical slot
                const double tl = (canon == slot) ? tc : 1.0 - tc;
                nodes.push_back({g.steiner_node(eidx, j), a + (b - a) * tl});
            }
        }
        for (size_t p = 0; p < nodes.size(); ++p)
            for (size_t q = p + 1; q < nodes.size(); ++q) {
                if (nodes[p].node == nodes[q].node) continue;
                const double w = (nodes[p].pos - nodes[q].pos).norm();
                g.adj[nodes[p].node].push_back({nodes[q].node, w, f});
                g.adj[nodes[q].node].push_back({nodes[p].node, w, f});
            }
    }
    return g;
}

Vec2 bary_position(const std::array<Vec2, 3>& dev, const std::array<double, 3>& b) {
    return dev[0] * b[0] + dev[1] * b[1] + dev[2] * b[2];
}

SurfacePoint normalized(const ConeSurface& s, SurfacePoint p) {
    require(p.face >= 0 && p.face < s.topo().face_count(), Err::BadParameter,
            "surface point face out of range");
    double sum = 0.0;
    for (double& b : p.bary) {
        require(b > -1e-9, Err::BadParameter, "negative barycentric coordinate");
        b = std::max(b, 0.0);
        sum += b;
    }
    require(sum > 0.0, Err::BadParameter, "zero barycentric coordinates");
    for (double& b : p.bary) b /= sum;
    return p;
}

constexpr double kSnapTol = 1e-12;

// A query point attached to the graph: either snapped to an existing vertex
// node or added as an extra node connected inside its containing face(s).
struct QueryAttachment {
    int node = -1;
    bool is_vertex_node = false;
    std::map<int, Vec2> pos_in_face;
};

QueryAttachment attach_point(DistanceGraph& g, const ConeSurface& s, const SurfacePoint& raw) {
    const Triangulation& t = s.topo();
    SurfacePoint p = normalized(s, raw);
    const auto dev = s.develop_face(p.face);

    int zeros = 0;
    for (double b : p.bary) zeros += (b < kSnapTol);
    QueryAttachment at;

    if (zeros >= 2) {
        int corner = 0;
        for (int i = 0; i < 3; ++i)
            if (p.bary[i] >= 1.0 - kSnapTol) corner = i;
        at.node = t.vertex_at(p.face, corner);
        at.is_vertex_node = true;
        return at;
    }

    const int node = g.node_count();
    g.adj.push_back({});
    g.node_edge.push_back(-1);
    at.node = node;

    auto connect_in_face = [&](int f, Vec2 pos) {
        at.pos_in_face[f] = pos;
        for (const auto& nf : g.face_nodes[f]) {
            const double w = (pos - nf.pos).norm();
            g.adj[node].push_back({nf.node, w, f});
            g.adj[nf.node].push_back({node, w, f});
        }
    };

    if (zeros == 1) {  // on an edge: reach into both incident faces
        int slot_local = 0;
        for (int i = 0; i < 3; ++i)
            if (p.bary[i] < kSnapTol) slot_local = i;
        const int slot = Triangulation::slot_id(p.face, slot_local);
        g.node_edge[node] = t.undirected_edge(slot);
        connect_in_face(p.face, bary_position(dev, p.bary));
        const int partner = t.partner(slot);
        if (partner >= 0) {
            const int pf = partner / 3;
            const int pl = partner % 3;
            const double tp = p.bary[(slot_local + 2) % 3];  // parameter from tail of `slot`
            const auto pdev = s.develop_face(pf);
            const Vec2 a = pdev[(pl + 1) % 3];
            const Vec2 b = pdev[(pl + 2) % 3];
            connect_in_face(pf, a + (b - a) * (1.0 - tp));
        }
        return at;
    }

    connect_in_face(p.face, bary_position(dev, p.bary));
    return at;
}

struct DijkstraResult {
    std::vector<double> dist;
    std::vector<int> parent;
    std::vector<int> parent_face;
};

DijkstraResult dijkstra(const DistanceGraph& g, int source, int target = -1) {
    DijkstraResult r;
    r.dist.assign(g.node_count(), kInf);
    r.parent.assign(g.node_count(), -1);
    r.parent_face.assign(g.node_count(), -1);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    r.dist[source] = 0.0;
    pq.push({0.0, source});
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d > r.dist[u]) continue;
        if (u == target) break;
        for (const auto& e : g.adj[u]) {
            const double nd = d + e.w;
            if (nd < r.dist[e.to]) {
                r.dist[e.to] = nd;
                r.parent[e.to] = u;
                r.parent_face[e.to] = e.face;
                pq.push({nd, e.to});
            }
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Funnel straightening over the traversed face strip
// ---------------------------------------------------------------------------

double triarea2(Vec2 a, Vec2 b, Vec2 c) { return (b - a).cross(c - a); }

std::vector<Vec2> funnel_path(Vec2 s, Vec2 t, const std::vector<std::pair<Vec2, Vec2>>& portals,
                              double eps) {
    struct Gate {
        Vec2 l, r;
    };
    std::vector<Gate> gates;
    gates.reserve(portals.size() + 2);
    gates.push_back({s, s});
    for (const auto& p : portals) gates.push_back({p.first, p.second});
    gates.push_back({t, t});

    auto vequal = [eps](Vec2 a, Vec2 b) { return (a - b).squared_norm() <= eps * eps; };

    std::vector<Vec2> pts{s};
    Vec2 apex = s, pl = s, pr = s;
    size_t apex_i = 0, left_i = 0, right_i = 0;

    for (size_t i = 1; i < gates.size(); ++i) {
        const Vec2 left = gates[i].l, right = gates[i].r;

        if (triarea2(apex, pr, right) <= 0.0) {
            if (vequal(apex, pr) || triarea2(apex, pl, right) > 0.0) {
                pr = right;
                right_i = i;
            } else {
                if (!vequal(pts.back(), pl)) pts.push_back(pl);
                apex = pl;
                apex_i = left_i;
                pl = pr = apex;
                left_i = right_i = apex_i;
                i = apex_i;
                continue;
            }
        }
        if (triarea2(apex, pl, left) >= 0.0) {
            if (vequal(apex, pl) || triarea2(apex, pr, left) < 0.0) {
                pl = left;
                left_i = i;
            } else {
                if (!vequal(pts.back(), pr)) pts.push_back(pr);
                apex = pr;
                apex_i = right_i;
                pl = pr = apex;
                left_i = right_i = apex_i;
                i = apex_i;
                continue;
            }
        }
    }
    if (!vequal(pts.back(), t)) pts.push_back(t);
    return pts;
}

double polyline_length(const std::vector<Vec2>& pts) {
    NeumaierSum s;
    for (size_t i = 1; i < pts.size(); ++i) s.add((pts[i] - pts[i - 1]).norm());
    return s.value();
}

struct Rigid {
    double c = 1.0, s = 0.0;
    Vec2 t;
    Vec2 apply(Vec2 p) const { return {c * p.x - s * p.y + t.x, s * p.x + c * p.y + t.y}; }
};

Rigid rigid_from_segment(Vec2 p0, Vec2 p1, Vec2 q0, Vec2 q1) {
    const Vec2 u = p1 - p0, v = q1 - q0;
    const double n2 = u.squared_norm();
    Rigid r;
    r.c = u.dot(v) / n2;
    r.s = u.cross(v) / n2;
    r.t = q0 - Vec2{r.c * p0.x - r.s * p0.y, r.s * p0.x + r.c * p0.y};
    return r;
}

struct StripSegment {
    std::vector<int> faces;
    std::vector<int> crossing_slots;  // slot in faces[j], glued into faces[j+1]
    std::vector<std::array<Vec2, 3>> placed;
    Vec2 start, end;
};

// Unfold the strip into the plane of faces[0]; shared corners chain exactly.
void unfold_strip(const ConeSurface& s, StripSegment& seg) {
    const Triangulation& t = s.topo();
    seg.placed.clear();
    seg.placed.push_back(s.develop_face(seg.faces[0]));
    for (size_t j = 0; j < seg.crossing_slots.size(); ++j) {
        const int slot = seg.crossing_slots[j];
        const int sl = slot % 3;
        const Vec2 a = seg.placed[j][(sl + 1) % 3];  // tail of slot
        const Vec2 b = seg.placed[j][(sl + 2) % 3];  // head of slot
        const int p = t.partner(slot);
        const int pf = p / 3, pl = p % 3;
        const auto dev = s.develop_face(pf);
        // tail(slot) ~ head(partner), head(slot) ~ tail(partner)
        const Rigid r = rigid_from_segment(dev[(pl + 2) % 3], dev[(pl + 1) % 3], a, b);
        std::array<Vec2, 3> placed;
        placed[(pl + 2) % 3] = a;
        placed[(pl + 1) % 3] = b;
        placed[pl] = r.apply(dev[pl]);
        seg.placed.push_back(placed);
    }
}

// (left, right) portal endpoints, consistent across the strip via the shared
// local corner between consecutive portals. Also reports the local corners
// assigned to each side when requested.
std::vector<std::pair<Vec2, Vec2>> orient_portals(const ConeSurface& s, const StripSegment& seg) {
    const Triangulation& t = s.topo();
    std::vector<std::pair<Vec2, Vec2>> out;
    int prev_l_corner = -1, prev_r_corner = -1;  // local corners in faces[j+1]
    for (size_t j = 0; j < seg.crossing_slots.size(); ++j) {
        const int slot = seg.crossing_slots[j];
        const int sl = slot % 3;
        const Vec2 a = seg.placed[j][(sl + 1) % 3];  // tail of the slot in faces[j]
        const Vec2 b = seg.placed[j][(sl + 2) % 3];
        const int p = t.partner(slot);
        const int pl = p % 3;
        const int a_corner = (pl + 2) % 3;  // corner of faces[j+1] at position a
        const int b_corner = (pl + 1) % 3;

        bool a_is_left;
        if (j == 0) {
            const Vec2 mid = (a + b) * 0.5;
            const Vec2 d = mid - seg.start;
            a_is_left = d.cross(a - seg.start) >= d.cross(b - seg.start);
        } else if (a_corner == prev_l_corner) {
            a_is_left = true;
        } else if (a_corner == prev_r_corner) {
            a_is_left = false;
        } else if (b_corner == prev_l_corner) {
            a_is_left = false;
        } else {
            a_is_left = true;
        }

        if (a_is_left) {
            out.push_back({a, b});
            prev_l_corner = a_corner;
            prev_r_corner = b_corner;
        } else {
            out.push_back({b, a});
            prev_l_corner = b_corner;
            prev_r_corner = a_corner;
        }
    }
    return out;
}

struct PathStep {
    int from, to, face;
};

std::vector<PathStep> extract_steps(const DijkstraResult& r, int source, int target) {
    std::vector<PathStep> steps;
    int u = target;
    while (u != source) {
        const int p = r.parent[u];
        require(p >= 0, Err::DisconnectedPoint, "target not reached");
        steps.push_back({p, u, r.parent_face[u]});
        u = p;
    }
    std::reverse(steps.begin(), steps.end());
    return steps;
}

struct SegmentDetail {
    StripSegment strip;
    std::vector<std::pair<Vec2, Vec2>> portals;
    std::vector<Vec2> funnel;
};

struct StraightenOutput {
    double length = kInf;
    bool valid = false;
    std::vector<SegmentDetail> segments;
};

// All developed positions a node takes inside one face. A vertex class can
// own several corners of the same face (cone identifications), so this may
// return more than one candidate.
std::vector<Vec2> node_positions_in_face(const DistanceGraph& g, int node, int face,
                                         const std::map<int, Vec2>* extra_pos) {
    if (extra_pos) {
        auto it = extra_pos->find(face);
        if (it != extra_pos->end()) return {it->second};
    }
    std::vector<Vec2> out;
    for (const auto& nf : g.face_nodes[face])
        if (nf.node == node) out.push_back(nf.pos);
    require(!out.empty(), Err::DisconnectedPoint, "node not on expected face");
    return out;
}

// Funnel passes between consecutive vertex-node visits. Result is an upper
// bound, no larger than the graph path length up to round-off.
StraightenOutput straighten(const DistanceGraph& g, const ConeSurface& s,
                            const std::vector<PathStep>& steps, const QueryAttachment& from_at,
                            const QueryAttachment& to_at, bool want_detail) {
    StraightenOutput out;
    if (steps.empty()) {
        out.length = 0.0;
        out.valid = true;
        return out;
    }
    const Triangulation& topo = s.topo();

    auto candidates_of = [&](int node, int face) -> std::vector<Vec2> {
        const std::map<int, Vec2>* extra = nullptr;
        if (node == from_at.node && !from_at.is_vertex_node) extra = &from_at.pos_in_face;
        if (node == to_at.node && !to_at.is_vertex_node) extra = &to_at.pos_in_face;
        return node_positions_in_face(g, node, face, extra);
    };
    // Resolve the ambiguity toward the shortest interpretation; the funnel
    // result stays a genuine path length.
    auto resolve_pair = [&](int node_a, int node_b, int face) -> std::pair<Vec2, Vec2> {
        const auto as = candidates_of(node_a, face);
        const auto bs = candidates_of(node_b, face);
        double best = kInf;
        std::pair<Vec2, Vec2> out_pair{as[0], bs[0]};
        for (const Vec2& a : as)
            for (const Vec2& b : bs) {
                const double d = (a - b).squared_norm();
                if (d < best) {
                    best = d;
                    out_pair = {a, b};
                }
            }
        return out_pair;
    };

    std::vector<std::pair<size_t, size_t>> ranges;  // [begin, end) into steps
    size_t begin = 0;
    for (size_t i = 0; i + 1 < steps.size(); ++i)
        if (steps[i].to < g.vertex_nodes) {
            ranges.push_back({begin, i + 1});
            begin = i + 1;
        }
    ranges.push_back({begin, steps.size()});

    NeumaierSum total;
    for (const auto& [lo, hi] : ranges) {
        StripSegment seg;
        seg.faces.push_back(steps[lo].face);
        for (size_t i = lo; i < hi; ++i) {
            if (steps[i].face == seg.faces.back()) continue;
            const int junction = steps[i].from;
            const int edge_slot = g.node_edge[junction];
            if (edge_slot < 0) return {};
            const int cur = seg.faces.back();
            int slot_in_cur;
            if (edge_slot / 3 == cur)
                slot_in_cur = edge_slot;
            else if (topo.partner(edge_slot) >= 0 && topo.partner(edge_slot) / 3 == cur)
                slot_in_cur = topo.partner(edge_slot);
            else
                return {};
            if (topo.partner(slot_in_cur) < 0 || topo.partner(slot_in_cur) / 3 != steps[i].face)
                return {};
            seg.crossing_slots.push_back(slot_in_cur);
            seg.faces.push_back(steps[i].face);
        }

        seg.start = resolve_pair(steps[lo].from, steps[lo].to, seg.faces.front()).first;
        unfold_strip(s, seg);
        {
            const int end_face = seg.faces.back();
            const Vec2 local =
                resolve_pair(steps[hi - 1].from, steps[hi - 1].to, end_face).second;
            const auto dev = s.develop_face(end_face);
            const Rigid r =
                rigid_from_segment(dev[0], dev[1], seg.placed.back()[0], seg.placed.back()[1]);
            seg.end = r.apply(local);
        }

        double scale = 1.0;
        for (const auto& tri : seg.placed)
            for (const auto& c : tri) scale = std::max({scale, std::abs(c.x), std::abs(c.y)});

        auto portals = orient_portals(s, seg);
        auto pts = funnel_path(seg.start, seg.end, portals, 1e-13 * scale);
        total.add(polyline_length(pts));
        if (want_detail) out.segments.push_back({std::move(seg), std::move(portals), std::move(pts)});
    }
    out.length = total.value();
    out.valid = true;
    return out;
}

struct LevelResult {
    double graph = kInf;
    double straightened = kInf;
    StraightenOutput detail;
};

LevelResult run_level(const ConeSurface& s, const SurfacePoint& x, const SurfacePoint& y,
                      int level, bool want_detail) {
    DistanceGraph g = build_graph(s, level);
    QueryAttachment ax = attach_point(g, s, x);
    QueryAttachment ay = attach_point(g, s, y);
    LevelResult res;
    if (ax.node == ay.node) {
        res.graph = res.straightened = 0.0;
        res.detail.valid = true;
        return res;
    }
    DijkstraResult dj = dijkstra(g, ax.node, ay.node);
    require(dj.dist[ay.node] < kInf, Err::DisconnectedPoint, "no path between query points");
    res.graph = dj.dist[ay.node];
    auto steps = extract_steps(dj, ax.node, ay.node);
    StraightenOutput st = straighten(g, s, steps, ax, ay, want_detail);
    if (st.valid) {
        res.straightened = st.length;
        res.detail = std::move(st);
    }
    return res;
}

// Canonical query order; the straightening pass follows the Dijkstra parent
// tree, so fixing the order makes the reported bound exactly symmetric.
bool point_less(const SurfacePoint& a, const SurfacePoint& b) {
    if (a.face != b.face) return a.face < b.face;
    for (int i = 0; i < 3; ++i)
        if (a.bary[i] != b.bary[i]) return a.bary[i] < b.bary[i];
    return false;
}

}  // namespace

double intrinsic_distance(const ConeSurface& s, const SurfacePoint& x, const SurfacePoint& y,
                          int level) {
    require(level >= 0, Err::BadParameter, "level must be nonnegative");
    const SurfacePoint& a = point_less(y, x) ? y : x;
    const SurfacePoint& b = point_less(y, x) ? x : y;
    double best = kInf;
    for (int l = 0; l <= level; ++l) {
        LevelResult r = run_level(s, a, b, l, false);
        best = std::min({best, r.graph, r.straightened});
    }
    return best;
}

DistanceField compute_distance_field(const ConeSurface& s, const SurfacePoint& x, int level) {
    DistanceGraph g = build_graph(s, level);
    QueryAttachment ax = attach_point(g, s, x);
    DijkstraResult dj = dijkstra(g, ax.node);
    DistanceField f;
    f.level = level;
    f.source_node = ax.node;
    f.node_distance = std::move(dj.dist);
    return f;
}

GeodesicPolyline intrinsic_path(const ConeSurface& s, const SurfacePoint& x,
                                const SurfacePoint& y, int level) {
    LevelResult r = run_level(s, x, y, level, true);
    GeodesicPolyline out;
    out.length = std::min(r.graph, r.straightened);
    out.points.push_back(x);

    for (const auto& segd : r.detail.segments) {
        const auto& seg = segd.strip;
        for (size_t a = 0; a + 1 < segd.funnel.size(); ++a) {
            const Vec2 p = segd.funnel[a], q = segd.funnel[a + 1];
            // Portal crossings between consecutive funnel apexes.
            for (size_t j = 0; j < segd.portals.size(); ++j) {
                const auto& [L, R] = segd.portals[j];
                const Vec2 d = q - p, e = R - L;
                const double den = d.cross(e);
                if (std::abs(den) < 1e-18) continue;
                const double tt = (L - p).cross(e) / den;
                const double uu = (L - p).cross(d) / den;
                if (tt <= 1e-12 || tt >= 1.0 - 1e-12 || uu < -1e-9 || uu > 1.0 + 1e-9) continue;
                const int slot = seg.crossing_slots[j];
                const int sl = slot % 3;
                const Vec2 tail_pos = seg.placed[j][(sl + 1) % 3];
                const Vec2 hit = L + e * uu;
                double t_from_tail = (hit - tail_pos).norm() / s.length(slot);
                t_from_tail = std::clamp(t_from_tail, 0.0, 1.0);
                SurfacePoint sp;
                sp.face = slot / 3;
                sp.bary = {0.0, 0.0, 0.0};
                sp.bary[(sl + 1) % 3] = 1.0 - t_from_tail;
                sp.bary[(sl + 2) % 3] = t_from_tail;
                out.points.push_back(sp);
            }
            // Interior funnel apexes are strip corners (surface vertices).
            if (a + 2 < segd.funnel.size()) {
                bool found = false;
                for (size_t j = 0; j < seg.placed.size() && !found; ++j)
                    for (int c = 0; c < 3 && !found; ++c)
                        if ((seg.placed[j][c] - q).squared_norm() < 1e-18) {
                            out.points.push_back(SurfacePoint::at_corner(seg.faces[j], c));
                            found = true;
                        }
            }
        }
    }
    out.points.push_back(y);
    return out;
}

double uniform_distance(const std::vector<double>& d1, const std::vector<double>& d2) {
    require(!d1.empty(), Err::EmptySample, "uniform distance needs a nonempty sample");
    require(d1.size() == d2.size(), Err::BadParameter, "sample size mismatch");
    double best = 0.0;
    for (size_t i = 0; i < d1.size(); ++i) best = std::max(best, std::abs(d1[i] - d2[i]));
    return best;
}

double geodesic_circle_length(const ConeSurface& s, int vertex, double radius, int n_rays) {
    const Triangulation& t = s.topo();
    require(vertex >= 0 && vertex < t.vertex_count(), Err::BadParameter, "vertex out of range");
    require(n_rays >= 3, Err::BadParameter, "need at least 3 rays");
    require(radius > 0.0, Err::BadParameter, "radius must be positive");

    double min_incident = kInf;
    for (int c : t.vertex_fan(vertex)) {
        const int f = c / 3, i = c % 3;
        min_incident = std::min(min_incident, s.length(3 * f + (i + 1) % 3));
        min_incident = std::min(min_incident, s.length(3 * f + (i + 2) % 3));
    }
    require(radius <= 0.25 * min_incident + 1e-15, Err::RadiusTooLarge,
            "radius above the local injectivity heuristic");

    // The radius-r neighborhood develops onto a flat sector of angle theta;
    // the metric circle is the inscribed chord polygon over n_rays probes.
    const double theta = s.angle_sum_at_vertex(vertex);
    const double step = theta / n_rays;
    return n_rays * 2.0 * radius * std::sin(0.5 * step);
}

}  // namespace alx
