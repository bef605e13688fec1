#include "sgm/kmeans.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "sgm/error.hpp"
#include "sgm/kernels.hpp"
#include "sgm/rng.hpp"

namespace sgm {

namespace {

constexpr int kRestarts = 10;
constexpr int kMaxIterations = 100;
constexpr double kRelTol = 1e-7;

Eigen::MatrixXd plus_plus_init(const Eigen::MatrixXd& points, int k, Rng& rng) {
    const int n = static_cast<int>(points.rows());
    Eigen::MatrixXd centroids(k, points.cols());
    centroids.row(0) = points.row(static_cast<int>(rng.index(n)));

    Eigen::VectorXd best = (points.rowwise() - centroids.row(0)).rowwise().squaredNorm();
    for (int c = 1; c < k; ++c) {
        const double total = best.sum();
        int pick;
        if (total > 0.0) {
            // D^2 sampling via prefix scan in index order
            const double r = rng.uniform() * total;
            double acc = 0.0;
            pick = n - 1;
            for (int i = 0; i < n; ++i) {
                acc += best[i];
                if (acc >= r) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = static_cast<int>(rng.index(n));
        }
        centroids.row(c) = points.row(pick);
        best = best.cwiseMin((points.rowwise() - centroids.row(c)).rowwise().squaredNorm());
    }
    return centroids;
}

struct RunResult {
    ClusterResult res;
    bool valid = false;
};

RunResult run_once(const Eigen::MatrixXd& points, int k, std::uint64_t seed) {
    const int n = static_cast<int>(points.rows());
    const int d = static_cast<int>(points.cols());
    Rng rng(seed);

    ClusterResult res;
    res.centroids = plus_plus_init(points, k, rng);

    double prev = std::numeric_limits<double>::infinity();
    Eigen::VectorXd dist2;
    for (int iter = 0; iter < kMaxIterations; ++iter) {
        kernels::nearest_two(points, res.centroids, res.nearest, res.second, dist2);
        const double obj = dist2.sum();

        // means accumulated in point-index order
        Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(k, d);
        Eigen::VectorXi count = Eigen::VectorXi::Zero(k);
        for (int i = 0; i < n; ++i) {
            sum.row(res.nearest[i]) += points.row(i);
            ++count[res.nearest[i]];
        }
        for (int c = 0; c < k; ++c) {
            if (count[c] > 0) {
                res.centroids.row(c) = sum.row(c) / count[c];
            } else {
                // deterministic reseed: the point farthest from its centroid
                int far = 0;
                for (int i = 1; i < n; ++i)
                    if (dist2[i] > dist2[far]) far = i;
                res.centroids.row(c) = points.row(far);
            }
        }

        if (prev - obj <= kRelTol * obj) break;
        prev = obj;
    }

    kernels::nearest_two(points, res.centroids, res.nearest, res.second, dist2);
    res.objective = dist2.sum();

    Eigen::VectorXi count = Eigen::VectorXi::Zero(k);
    for (int i = 0; i < n; ++i) ++count[res.nearest[i]];
    RunResult out;
    out.res = std::move(res);
    out.valid = (count.array() > 0).all();
    return out;
}

} // namespace

ClusterResult kmeans_cluster(const Eigen::MatrixXd& points, int k, std::uint64_t seed) {
    const int n = static_cast<int>(points.rows());
    if (k < 1) throw PipelineError("cluster count must be positive");
    if (n < k) throw PipelineError("fewer points than clusters");

    ClusterResult best;
    bool have = false;
    for (int restart = 0; restart < kRestarts; ++restart) {
        // a failed restart (empty cluster) redraws with a fresh substream
        RunResult run{};
        for (int retry = 0; retry < 20 && !run.valid; ++retry)
            run = run_once(points, k, derive_seed(seed, 1000 * restart + retry));
        if (!run.valid) continue;
        if (!have || run.res.objective < best.objective) {
            best = std::move(run.res);
            have = true;
        }
    }
    if (!have) throw PipelineError("k-means could not fill all clusters");
    return best;
}

} // namespace sgm
