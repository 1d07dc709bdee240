#pragma once

#include <array>
#include <optional>
#include <vector>

#include "alx/core.hpp"

namespace alx {

// Conventions
// -----------
// A face f has corners 0,1,2, listed counterclockwise. Edge slot i of face f
// (global id 3f+i) is the edge opposite corner i, directed from corner (i+1)%3
// to corner (i+2)%3. A gluing pair [a, b] identifies slot a with slot b
// traversed backwards -- tail(a)=head(b), head(a)=tail(b) -- which is the
// coherent isometric gluing for counterclockwise faces. A negative entry
// ~e = -1-e requests the same-direction identification; such inputs describe a
// non-orientable fold and are rejected with OrientationClash.
//
// Vertices are never part of the input: they are the orbits of corners under
// the rotation generated by the gluing.

struct Corner {
    int face = 0;
    int slot = 0;  // local corner index in {0,1,2}
};

class Triangulation {
public:
    // `gluing` pairs global edge slots; slots absent from all pairs are boundary.
    static Triangulation build(int face_count, const std::vector<std::array<int, 2>>& gluing);

    int face_count() const { return faces_; }
    int edge_count() const;    // undirected edges after identification
    int vertex_count() const { return static_cast<int>(vertex_fans_.size()); }
    int euler_characteristic() const;
    bool closed() const { return boundary_loops_.empty(); }

    int partner(int slot) const { return partner_[slot]; }
    bool is_boundary_slot(int slot) const { return partner_[slot] < 0; }
    int gluing_pair_count() const { return gluing_pairs_; }

    // Derived vertex id of a corner.
    int vertex_at(int face, int corner) const { return vertex_of_corner_[3 * face + corner]; }
    int vertex_at_corner_id(int corner_id) const { return vertex_of_corner_[corner_id]; }

    // Corners around each vertex in fan order (a cycle for interior vertices,
    // a chain for boundary vertices).
    const std::vector<int>& vertex_fan(int v) const { return vertex_fans_[v]; }
    bool vertex_is_boundary(int v) const { return vertex_is_boundary_[v]; }

    // Ordered loops of boundary slots.
    const std::vector<std::vector<int>>& boundary_loops() const { return boundary_loops_; }

    // Canonical undirected edge id of a slot: min(slot, partner) for interior
    // edges, the slot itself on the boundary.
    int undirected_edge(int slot) const {
        const int p = partner_[slot];
        return p < 0 ? slot : std::min(slot, p);
    }

    static int slot_id(int face, int i) { return 3 * face + i; }
    static int tail_corner(int slot) { return 3 * (slot / 3) + (slot % 3 + 1) % 3; }
    static int head_corner(int slot) { return 3 * (slot / 3) + (slot % 3 + 2) % 3; }
    static int slot_with_tail(int corner_id) { return 3 * (corner_id / 3) + (corner_id % 3 + 2) % 3; }
    static int slot_with_head(int corner_id) { return 3 * (corner_id / 3) + (corner_id % 3 + 1) % 3; }

private:
    int faces_ = 0;
    int gluing_pairs_ = 0;
    std::vector<int> partner_;
    std::vector<int> vertex_of_corner_;
    std::vector<std::vector<int>> vertex_fans_;
    std::vector<bool> vertex_is_boundary_;
    std::vector<std::vector<int>> boundary_loops_;

    void derive_vertices_and_boundary();
};

// Triangulation from per-face edge labels. faces[f][i] is the label of the
// edge opposite corner i; labels must form a permutation of 0..3F-1. Gluing
// pairs refer to labels. Returns the triangulation together with the
// label -> slot map (identity when labels already equal slot ids).
Triangulation build_triangulation(const std::vector<std::array<int, 3>>& faces,
                                  const std::vector<std::array<int, 2>>& gluing,
                                  std::vector<int>* label_to_slot = nullptr);

class ConeSurface {
public:
    // Lengths are indexed by slot; glued slots must agree within 1e-12
    // relative (they are then canonicalized to a single stored value).
    static ConeSurface glue(Triangulation topo, std::vector<double> lengths);

    const Triangulation& topo() const { return topo_; }
    double length(int slot) const { return len_[slot]; }
    const std::vector<double>& lengths() const { return len_; }

    // Interior angle at a corner from the law of cosines; in (0, pi).
    double corner_angle(int face, int corner) const;
    double angle_sum_at_vertex(int v) const;

    // Planar development of face f: corner 0 at the origin, corner 1 on the
    // positive x-axis, corner 2 in the upper half plane.
    std::array<Vec2, 3> develop_face(int face) const;

    ConeSurface scaled(double lambda) const;

    bool has_embedding() const { return !corner_pos_.empty(); }
    // Per-corner positions (3F entries); corners of one vertex class coincide.
    const std::vector<Vec3>& corner_positions() const { return corner_pos_; }
    void attach_embedding(std::vector<Vec3> corner_positions);

private:
    Triangulation topo_;
    std::vector<double> len_;
    std::vector<Vec3> corner_pos_;
};

// Spec operations as free functions.
double vertex_angle(const ConeSurface& s, Corner c);
int euler_characteristic(const Triangulation& t);

// From an indexed triangle soup in R^3 with coherent (outward) orientation.
// Gluings are derived from shared vertex-index pairs; the embedding is kept.
ConeSurface surface_from_indexed_triangles(const std::vector<Vec3>& vertices,
                                           const std::vector<std::array<int, 3>>& triangles);

// Reference shapes.
ConeSurface make_cube_surface(double edge = 1.0);
ConeSurface make_square_torus(double side = 1.0);
ConeSurface make_triangle_double(double a, double b, double c);
ConeSurface make_flat_hexagon_disk(double side = 1.0);

}  // namespace alx
