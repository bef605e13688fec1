#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "sgm/shape.hpp"

namespace sgm {

// One segmentation region. `vertices` is the strict region R (a connected
// component of one nearest-centroid set, possibly grown by tiny-region
// merges); `expanded` is R*, the connected superset of R inside the set of
// vertices whose first or second nearest centroid is this node's cluster.
struct GraphNode {
    int cluster = -1;
    std::vector<int> vertices; // sorted
    std::vector<int> expanded; // sorted, R subset of R*
    double area = 0.0;
};

struct ShapeGraph {
    std::vector<GraphNode> nodes;
    std::vector<std::vector<int>> adjacency; // sorted node ids
    std::vector<int> vertex_node;            // every vertex belongs to one node

    int node_count() const { return static_cast<int>(nodes.size()); }
    std::vector<int> degrees() const;
};

// Regions = connected components of the nearest-centroid sets. Regions below
// tiny_area_frac of the total area are merged into the neighbor sharing the
// longest boundary. Edges connect nodes whose expanded sets overlap.
ShapeGraph build_shape_graph(const Shape& shape, const Eigen::VectorXi& nearest,
                             const Eigen::VectorXi& second, double tiny_area_frac = 0.0025);

// L1 distance between degree-count histograms (padded to the longer one)
// plus the node-count difference. Zero for isomorphic graphs.
double degree_histogram_distance(const ShapeGraph& a, const ShapeGraph& b);

// Alternative metric: L1 between sorted degree lists (padded), plus the same
// node-count term.
double degree_list_distance(const ShapeGraph& a, const ShapeGraph& b);

struct SegmentationResult {
    int k = 0;
    ShapeGraph graph_a;
    ShapeGraph graph_b;
    Eigen::MatrixXd centroids;
    double graph_distance = 0.0;
};

// Clusters the merged descriptor set for every k in [k_min, k_max], builds
// both shape graphs, and keeps the k minimizing the degree-histogram distance
// (ties toward smaller k). desc_b must already be rank-aligned onto desc_a.
SegmentationResult select_k(const Shape& shape_a, const Eigen::MatrixXd& desc_a,
                            const Shape& shape_b, const Eigen::MatrixXd& desc_b,
                            int k_min, int k_max, std::uint64_t seed,
                            double tiny_area_frac = 0.0025, bool use_degree_list = false);

} // namespace sgm
