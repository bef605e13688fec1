#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "sgm/error.hpp"
#include "sgm/kmeans.hpp"
#include "sgm/rng.hpp"

using namespace sgm;

namespace {

// three well-separated 2D blobs, 4 points each
Eigen::MatrixXd blob_points() {
    Eigen::MatrixXd p(12, 2);
    p << 0.0, 0.0, 0.3, 0.1, -0.2, 0.2, 0.1, -0.3,
         10.0, 10.0, 10.2, 9.8, 9.7, 10.1, 10.1, 10.3,
         -10.0, 10.0, -10.3, 10.2, -9.8, 9.9, -10.1, 9.7;
    return p;
}

// exhaustive k-means objective over every assignment of n points to k
// non-empty clusters; n and k small enough to enumerate
double brute_force_objective(const Eigen::MatrixXd& p, int k) {
    const int n = static_cast<int>(p.rows());
    long long total = 1;
    for (int i = 0; i < n; ++i) total *= k;

    double best = std::numeric_limits<double>::infinity();
    std::vector<int> assign(n);
    for (long long code = 0; code < total; ++code) {
        long long c = code;
        for (int i = 0; i < n; ++i) {
            assign[i] = static_cast<int>(c % k);
            c /= k;
        }
        Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(k, p.cols());
        Eigen::VectorXi count = Eigen::VectorXi::Zero(k);
        for (int i = 0; i < n; ++i) {
            sum.row(assign[i]) += p.row(i);
            ++count[assign[i]];
        }
        if ((count.array() == 0).any()) continue;
        double obj = 0.0;
        for (int i = 0; i < n; ++i)
            obj += (p.row(i) - sum.row(assign[i]) / count[assign[i]]).squaredNorm();
        best = std::min(best, obj);
    }
    return best;
}

} // namespace

TEST_CASE("k-means reaches the exhaustive optimum on separated blobs") {
    const Eigen::MatrixXd p = blob_points();
    const double oracle = brute_force_objective(p, 3);
    ClusterResult res = kmeans_cluster(p, 3, 42);
    CHECK(res.objective == doctest::Approx(oracle).epsilon(1e-9));

    // blob membership: points 0-3, 4-7, 8-11 share a centroid
    for (int blob = 0; blob < 3; ++blob)
        for (int i = 1; i < 4; ++i)
            CHECK(res.nearest[4 * blob + i] == res.nearest[4 * blob]);
    CHECK(res.nearest[0] != res.nearest[4]);
    CHECK(res.nearest[4] != res.nearest[8]);
}

TEST_CASE("k-means is deterministic for a fixed seed") {
    const Eigen::MatrixXd p = blob_points();
    ClusterResult a = kmeans_cluster(p, 3, 7);
    ClusterResult b = kmeans_cluster(p, 3, 7);
    CHECK(a.centroids == b.centroids);
    CHECK(a.nearest == b.nearest);
    CHECK(a.second == b.second);
    CHECK(a.objective == b.objective);

    // the optimum is seed-independent on this easy input
    ClusterResult c = kmeans_cluster(p, 3, 12345);
    CHECK(c.objective == doctest::Approx(a.objective).epsilon(1e-9));
}

TEST_CASE("second-nearest differs from nearest and is no closer") {
    const Eigen::MatrixXd p = blob_points();
    ClusterResult res = kmeans_cluster(p, 3, 1);
    for (int i = 0; i < p.rows(); ++i) {
        CHECK(res.second[i] != res.nearest[i]);
        const double d1 = (p.row(i) - res.centroids.row(res.nearest[i])).squaredNorm();
        const double d2 = (p.row(i) - res.centroids.row(res.second[i])).squaredNorm();
        CHECK(d2 >= d1);
    }
}

TEST_CASE("k = 1 yields a single cluster with no second-nearest") {
    const Eigen::MatrixXd p = blob_points();
    ClusterResult res = kmeans_cluster(p, 1, 3);
    CHECK((res.nearest.array() == 0).all());
    CHECK((res.second.array() == -1).all());
    CHECK(res.centroids.row(0).isApprox(p.colwise().mean(), 1e-12));
}

TEST_CASE("degenerate inputs fail loudly") {
    Eigen::MatrixXd p = blob_points();
    CHECK_THROWS_AS(kmeans_cluster(p, 13, 1), PipelineError); // more clusters than points
    CHECK_THROWS_AS(kmeans_cluster(p, 0, 1), PipelineError);

    // k exceeds the number of distinct points: no valid clustering exists
    Eigen::MatrixXd dup = Eigen::MatrixXd::Zero(5, 2);
    CHECK_THROWS_AS(kmeans_cluster(dup, 2, 1), PipelineError);
}
