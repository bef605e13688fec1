#pragma once

#include <vector>

#include "sgm/shape.hpp"

namespace sgm {

// Shortest-path distances over the shape's edge graph with Euclidean edge
// lengths (meshes: triangle edges, point clouds: symmetrized kNN edges).
// Unreachable vertices get +infinity.
std::vector<double> geodesic_distances(const Shape& shape, int source);
std::vector<double> geodesic_distances(const Shape& shape, const std::vector<int>& sources);

} // namespace sgm
