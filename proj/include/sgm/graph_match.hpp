#pragma once

#include <vector>

#include <Eigen/Dense>

#include "sgm/shape_graph.hpp"

namespace sgm {

struct MatchingParams {
    double sigma = 0.5;
    int max_symmetry_order = 8;
    // a sorted candidate list is cut at the first drop below this ratio
    double gap_ratio = 0.9;
    // candidate pairs whose unary affinity falls below this are dropped
    double prune_threshold = 1e-4;
    // off-diagonal entries above this floor count toward the pairwise scale
    double nnz_floor = 1e-12;
    // guard against affinity matrices far beyond the intended graph sizes
    int max_nodes = 60;
};

struct MatchCandidate {
    int node = -1;
    double likelihood = 0.0;
};

// Many-to-many node matching. match_a[i] lists the B nodes paired with A
// node i by descending likelihood; match_b is the mirror view. The two sides
// are mutually consistent: j appears in match_a[i] iff i appears in
// match_b[j]. Nodes with empty match sets are listed as unmatched.
struct SymmetricMatching {
    std::vector<std::vector<MatchCandidate>> match_a;
    std::vector<std::vector<MatchCandidate>> match_b;
    std::vector<int> unmatched_a;
    std::vector<int> unmatched_b;
};

// All-pairs unweighted graph distances over the node adjacency; -1 marks
// unreachable pairs.
Eigen::MatrixXi graph_distances(const ShapeGraph& g);

// H[r] = number of nodes at graph distance r+1 from node i, up to the
// eccentricity of i. Unreachable nodes contribute nothing.
std::vector<int> node_histogram(const ShapeGraph& g, int i);

// Euclidean distance between two histograms, zero-padding the shorter one.
double unary_cost(const std::vector<int>& ha, const std::vector<int>& hb);

// Dense (na*nb) x (na*nb) affinity matrix: candidate pair (i, j) sits at row
// i*nb + j, unary affinities exp(-cost/sigma) on the diagonal, pairwise
// affinities scaled by 1/nnz off it. Candidates below prune_threshold have
// their row and column zeroed.
Eigen::MatrixXd assemble_affinity(const ShapeGraph& ga, const ShapeGraph& gb,
                                  const MatchingParams& params = {});

// Power iteration for the dominant eigenvector of a nonnegative symmetric
// matrix; result is nonnegative with unit maximum entry (all zero when the
// matrix is zero).
Eigen::VectorXd leading_eigenvector(const Eigen::MatrixXd& m);

// Keep, per node, the leading candidates until the likelihood drops below
// gap_ratio times the previous one; runs in both directions and keeps only
// mutual pairs. Lists longer than max_symmetry_order with no earlier gap
// leave the node unmatched, as do all-zero candidate rows.
SymmetricMatching discretize(const Eigen::VectorXd& x, int na, int nb,
                             const MatchingParams& params = {});

SymmetricMatching match_graphs(const ShapeGraph& ga, const ShapeGraph& gb,
                               const MatchingParams& params = {});

} // namespace sgm
