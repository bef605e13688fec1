#pragma once

#include <utility>
#include <vector>

#include "sgm/graph_match.hpp"
#include "sgm/shape.hpp"

namespace sgm {

// One-to-one resolution of a symmetric matching. Every pair comes from the
// input match sets; no node appears twice. Nodes whose candidates were all
// consumed by conflicts (or that never had any) are listed unresolved.
struct OneToOneMatching {
    std::vector<std::pair<int, int>> pairs; // (node_a, node_b), sorted by node_a
    std::vector<int> unresolved_a;
    std::vector<int> unresolved_b;
};

// Resolves symmetric match sets by geodesic propagation. Clean one-to-one
// pairs are accepted outright. The square group (both sides multi-matched)
// with the smallest combined order, then smallest total region area, seeds
// the propagation with its lowest-index nodes paired; afterwards the
// unresolved region closest to the fixed set V on shape A is repeatedly
// paired with its candidate closest to the fixed set W on shape B. Without
// a square group the accepted one-to-one pairs seed V and W; with no seed at
// all every node is reported unresolved.
OneToOneMatching break_symmetry(const ShapeGraph& ga, const ShapeGraph& gb,
                                const SymmetricMatching& sym, const Shape& shape_a,
                                const Shape& shape_b);

} // namespace sgm
