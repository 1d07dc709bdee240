#include "alx/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

namespace alx {

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

Triangulation Triangulation::build(int face_count,
                                   const std::vector<std::array<int, 2>>& gluing) {
    require(face_count >= 1, Err::BadParameter, "need at least one face");
    Triangulation t;
    t.faces_ = face_count;
    const int slots = 3 * face_count;
    t.partner_.assign(slots, -1);
    t.gluing_pairs_ = static_cast<int>(gluing.size());

    for (const auto& pair : gluing) {
        for (int raw : pair)
            require(raw >= 0, Err::OrientationClash,
                    "same-direction identification of edge " + std::to_string(-1 - raw) +
                        " makes the surface non-orientable");
        const int a = pair[0], b = pair[1];
        require(a < slots && b < slots, Err::BadParameter, "edge slot out of range");
        require(a != b, Err::NonManifold, "edge " + std::to_string(a) + " glued to itself");
        require(t.partner_[a] < 0, Err::NonManifold,
                "edge " + std::to_string(a) + " glued to two partners");
        require(t.partner_[b] < 0, Err::NonManifold,
                "edge " + std::to_string(b) + " glued to two partners");
        t.partner_[a] = b;
        t.partner_[b] = a;
    }

    // Faces must form one component under the gluing adjacency.
    UnionFind uf(face_count);
    for (int s = 0; s < slots; ++s)
        if (t.partner_[s] >= 0) uf.unite(s / 3, t.partner_[s] / 3);
    const int root = uf.find(0);
    for (int f = 1; f < face_count; ++f)
        require(uf.find(f) == root, Err::Disconnected, "face " + std::to_string(f) +
                                                           " not connected to face 0");

    t.derive_vertices_and_boundary();
    return t;
}

void Triangulation::derive_vertices_and_boundary() {
    const int corners = 3 * faces_;
    vertex_of_corner_.assign(corners, -1);
    vertex_fans_.clear();
    vertex_is_boundary_.clear();

    // Rotation around a vertex: step across the glued edge whose tail is at
    // the corner. Orbits are cycles (interior) or chains (boundary).
    auto rot = [&](int c) -> int {
        const int s = slot_with_tail(c);
        const int p = partner_[s];
        return p < 0 ? -1 : head_corner(p);
    };
    auto rot_inv = [&](int c) -> int {
        const int s = slot_with_head(c);
        const int p = partner_[s];
        return p < 0 ? -1 : tail_corner(p);
    };

    for (int c0 = 0; c0 < corners; ++c0) {
        if (vertex_of_corner_[c0] >= 0) continue;
        // Rewind to the start of the chain (or detect a full cycle).
        int start = c0;
        bool cycle = false;
        for (int steps = 0;; ++steps) {
            const int prev = rot_inv(start);
            if (prev < 0) break;
            if (prev == c0) { cycle = true; break; }
            start = prev;
            require(steps <= corners, Err::NonManifold, "corner orbit does not close");
        }
        if (cycle) start = c0;

        const int v = static_cast<int>(vertex_fans_.size());
        std::vector<int> fan;
        int c = start;
        while (c >= 0 && vertex_of_corner_[c] < 0) {
            vertex_of_corner_[c] = v;
            fan.push_back(c);
            c = rot(c);
        }
        vertex_fans_.push_back(std::move(fan));
        vertex_is_boundary_.push_back(!cycle);
    }

    // Chain unglued slots into boundary loops.
    boundary_loops_.clear();
    std::vector<bool> used(corners, false);
    for (int s0 = 0; s0 < corners; ++s0) {
        if (partner_[s0] >= 0 || used[s0]) continue;
        std::vector<int> loop;
        int s = s0;
        do {
            used[s] = true;
            loop.push_back(s);
            int c = head_corner(s);
            int next = slot_with_tail(c);
            int guard = 0;
            while (partner_[next] >= 0) {
                c = head_corner(partner_[next]);
                next = slot_with_tail(c);
                require(++guard <= corners, Err::NonManifold, "boundary walk does not close");
            }
            s = next;
        } while (s != s0);
        boundary_loops_.push_back(std::move(loop));
    }
}

int Triangulation::edge_count() const { return 3 * faces_ - gluing_pairs_; }

int Triangulation::euler_characteristic() const {
    return vertex_count() - edge_count() + face_count();
}

int euler_characteristic(const Triangulation& t) { return t.euler_characteristic(); }

Triangulation build_triangulation(const std::vector<std::array<int, 3>>& faces,
                                  const std::vector<std::array<int, 2>>& gluing,
                                  std::vector<int>* label_to_slot) {
    const int nf = static_cast<int>(faces.size());
    require(nf >= 1, Err::BadParameter, "need at least one face");
    const int slots = 3 * nf;
    std::vector<int> lab2slot(slots, -1);
    for (int f = 0; f < nf; ++f)
        for (int i = 0; i < 3; ++i) {
            const int lab = faces[f][i];
            require(lab >= 0 && lab < slots, Err::BadParameter,
                    "edge label " + std::to_string(lab) + " out of range");
            require(lab2slot[lab] < 0, Err::BadParameter,
                    "edge label " + std::to_string(lab) + " used twice");
            lab2slot[lab] = Triangulation::slot_id(f, i);
        }
    std::vector<std::array<int, 2>> slot_gluing;
    slot_gluing.reserve(gluing.size());
    for (const auto& g : gluing) {
        std::array<int, 2> pair{};
        for (int k = 0; k < 2; ++k) {
            if (g[k] < 0) {
                pair[k] = -1 - lab2slot[-1 - g[k]];  // keep the orientation request
            } else {
                require(g[k] < slots, Err::BadParameter, "gluing label out of range");
                pair[k] = lab2slot[g[k]];
            }
        }
        slot_gluing.push_back(pair);
    }
    if (label_to_slot) *label_to_slot = lab2slot;
    return Triangulation::build(nf, slot_gluing);
}

// ---------------------------------------------------------------------------
// ConeSurface
// ---------------------------------------------------------------------------

ConeSurface ConeSurface::glue(Triangulation topo, std::vector<double> lengths) {
    const int slots = 3 * topo.face_count();
    require(static_cast<int>(lengths.size()) == slots, Err::BadParameter,
            "need one length per edge slot");
    for (int s = 0; s < slots; ++s)
        require(lengths[s] > 0.0, Err::NonPositiveLength,
                "edge " + std::to_string(s) + " has non-positive length");

    for (int s = 0; s < slots; ++s) {
        const int p = topo.partner(s);
        if (p < 0 || p < s) continue;
        const double a = lengths[s], b = lengths[p];
        require(std::abs(a - b) <= 1e-12 * std::max(a, b), Err::LengthMismatch,
                "glued edges " + std::to_string(s) + "," + std::to_string(p) +
                    " carry different lengths");
        lengths[p] = lengths[s];  // canonical value: the smaller slot id wins
    }

    for (int f = 0; f < topo.face_count(); ++f) {
        const double a = lengths[3 * f], b = lengths[3 * f + 1], c = lengths[3 * f + 2];
        const double m = std::max({a, b, c});
        const bool ok = (a + b - c > 1e-12 * m) && (b + c - a > 1e-12 * m) &&
                        (c + a - b > 1e-12 * m);
        require(ok, Err::TriangleInequalityViolated,
                "face " + std::to_string(f) + " violates the strict triangle inequality");
    }

    ConeSurface s;
    s.topo_ = std::move(topo);
    s.len_ = std::move(lengths);
    return s;
}

double ConeSurface::corner_angle(int face, int corner) const {
    const double a = len_[3 * face + corner];
    const double b = len_[3 * face + (corner + 1) % 3];
    const double c = len_[3 * face + (corner + 2) % 3];
    double cosv = (b * b + c * c - a * a) / (2.0 * b * c);
    cosv = std::clamp(cosv, -1.0, 1.0);
    return std::acos(cosv);
}

double ConeSurface::angle_sum_at_vertex(int v) const {
    NeumaierSum sum;
    for (int c : topo_.vertex_fan(v)) sum.add(corner_angle(c / 3, c % 3));
    return sum.value();
}

std::array<Vec2, 3> ConeSurface::develop_face(int face) const {
    const double a = len_[3 * face];      // edge between corners 1,2
    const double b = len_[3 * face + 1];  // edge between corners 2,0
    const double c = len_[3 * face + 2];  // edge between corners 0,1
    const double x = (c * c + b * b - a * a) / (2.0 * c);
    const double y = std::sqrt(std::max(0.0, b * b - x * x));
    return {Vec2{0.0, 0.0}, Vec2{c, 0.0}, Vec2{x, y}};
}

ConeSurface ConeSurface::scaled(double lambda) const {
    require(lambda > 0.0, Err::BadParameter, "scale factor must be positive");
    ConeSurface s = *this;
    for (double& l : s.len_) l *= lambda;
    for (Vec3& p : s.corner_pos_) p = p * lambda;
    return s;
}

void ConeSurface::attach_embedding(std::vector<Vec3> corner_positions) {
    require(corner_positions.size() == len_.size(), Err::BadParameter,
            "embedding needs one position per corner");
    for (int c = 0; c < static_cast<int>(corner_positions.size()); ++c) {
        const int v = topo_.vertex_at_corner_id(c);
        const int rep = topo_.vertex_fan(v).front();
        require((corner_positions[c] - corner_positions[rep]).norm() <= 1e-9,
                Err::BadParameter, "embedding disagrees across a vertex class");
    }
    corner_pos_ = std::move(corner_positions);
}

double vertex_angle(const ConeSurface& s, Corner c) {
    require(c.face >= 0 && c.face < s.topo().face_count() && c.slot >= 0 && c.slot < 3,
            Err::BadParameter, "corner out of range");
    return s.corner_angle(c.face, c.slot);
}

// ---------------------------------------------------------------------------
// Indexed triangle soups and reference shapes
// ---------------------------------------------------------------------------

ConeSurface surface_from_indexed_triangles(const std::vector<Vec3>& vertices,
                                           const std::vector<std::array<int, 3>>& triangles) {
    const int nf = static_cast<int>(triangles.size());
    require(nf >= 1, Err::BadParameter, "empty triangle list");
    std::map<std::pair<int, int>, std::vector<int>> edge_slots;  // directed (tail,head) -> slots
    for (int f = 0; f < nf; ++f)
        for (int i = 0; i < 3; ++i) {
            const int tail = triangles[f][(i + 1) % 3];
            const int head = triangles[f][(i + 2) % 3];
            edge_slots[{tail, head}].push_back(Triangulation::slot_id(f, i));
        }

    std::vector<std::array<int, 2>> gluing;
    for (const auto& [key, list] : edge_slots) {
        require(list.size() == 1, Err::OrientationClash,
                "two faces traverse a shared edge in the same direction");
        auto rev = edge_slots.find({key.second, key.first});
        if (rev != edge_slots.end() && key.first < key.second)
            gluing.push_back({list[0], rev->second[0]});
    }

    Triangulation topo = Triangulation::build(nf, gluing);
    std::vector<double> len(3 * nf);
    std::vector<Vec3> corner_pos(3 * nf);
    for (int f = 0; f < nf; ++f)
        for (int i = 0; i < 3; ++i) {
            const Vec3 pt = vertices[triangles[f][(i + 1) % 3]];
            const Vec3 ph = vertices[triangles[f][(i + 2) % 3]];
            len[3 * f + i] = (ph - pt).norm();
            corner_pos[3 * f + i] = vertices[triangles[f][i]];
        }
    ConeSurface s = ConeSurface::glue(std::move(topo), std::move(len));
    s.attach_embedding(std::move(corner_pos));
    return s;
}

ConeSurface make_cube_surface(double edge) {
    require(edge > 0.0, Err::BadParameter, "cube edge must be positive");
    const double e = edge;
    std::vector<Vec3> v = {
        {0, 0, 0}, {e, 0, 0}, {e, e, 0}, {0, e, 0},  // bottom
        {0, 0, e}, {e, 0, e}, {e, e, e}, {0, e, e},  // top
    };
    // Quads listed counterclockwise as seen from outside.
    const std::array<std::array<int, 4>, 6> quads = {{
        {0, 3, 2, 1},  // bottom (z = 0, outward -z)
        {4, 5, 6, 7},  // top
        {0, 1, 5, 4},  // front (y = 0)
        {1, 2, 6, 5},  // right
        {2, 3, 7, 6},  // back
        {3, 0, 4, 7},  // left
    }};
    std::vector<std::array<int, 3>> tris;
    for (const auto& q : quads) {
        tris.push_back({q[0], q[1], q[2]});
        tris.push_back({q[0], q[2], q[3]});
    }
    return surface_from_indexed_triangles(v, tris);
}

ConeSurface make_square_torus(double side) {
    require(side > 0.0, Err::BadParameter, "side must be positive");
    Triangulation topo = Triangulation::build(2, {{{1, 5}}, {{2, 3}}, {{0, 4}}});
    const double d = side * std::sqrt(2.0);
    return ConeSurface::glue(std::move(topo), {side, d, side, side, side, d});
}

ConeSurface make_triangle_double(double a, double b, double c) {
    Triangulation topo = Triangulation::build(2, {{{0, 3}}, {{1, 5}}, {{2, 4}}});
    return ConeSurface::glue(std::move(topo), {a, b, c, a, c, b});
}

ConeSurface make_flat_hexagon_disk(double side) {
    require(side > 0.0, Err::BadParameter, "side must be positive");
    std::vector<Vec3> v;
    v.push_back({0, 0, 0});
    for (int k = 0; k < 6; ++k)
        v.push_back({side * std::cos(kPi * k / 3.0), side * std::sin(kPi * k / 3.0), 0});
    std::vector<std::array<int, 3>> tris;
    for (int k = 0; k < 6; ++k) tris.push_back({0, 1 + k, 1 + (k + 1) % 6});
    return surface_from_indexed_triangles(v, tris);
}

}  // namespace alx
