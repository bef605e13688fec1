#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace sgm {

// Lloyd's k-means with k-means++ seeding, 10 restarts, 100-iteration cap and
// relative objective tolerance 1e-7. Deterministic for a fixed seed: every
// restart derives its own substream and all reductions run in index order.
// Ties in assignment go to the lower centroid index.
struct ClusterResult {
    Eigen::MatrixXd centroids; // k x d
    Eigen::VectorXi nearest;   // per point
    Eigen::VectorXi second;    // second-nearest centroid (-1 when k == 1)
    double objective = 0.0;    // sum of squared distances to nearest
};

ClusterResult kmeans_cluster(const Eigen::MatrixXd& points, int k, std::uint64_t seed);

} // namespace sgm
