#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "sgm/kernels.hpp"
#include "sgm/rng.hpp"

using namespace sgm;

namespace {

Eigen::MatrixXd random_matrix(Rng& rng, int rows, int cols, double lo, double hi) {
    Eigen::MatrixXd m(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) m(i, j) = rng.uniform(lo, hi);
    return m;
}

} // namespace

TEST_CASE("hks_table matches the analytic formula and its serial twin") {
    Rng rng(11);
    const int n = 37, m = 9, d = 5;
    Eigen::VectorXd lambda = random_matrix(rng, m, 1, 0.0, 20.0).col(0);
    Eigen::MatrixXd phi = random_matrix(rng, n, m, -1.0, 1.0);
    Eigen::VectorXd times = random_matrix(rng, d, 1, 0.01, 0.5).col(0);

    Eigen::MatrixXd par, ser;
    kernels::hks_table(lambda, phi, times, par);
    kernels::hks_table_serial(lambda, phi, times, ser);
    CHECK(par == ser);

    for (int v = 0; v < n; ++v) {
        for (int i = 0; i < d; ++i) {
            double want = 0.0;
            for (int l = 0; l < m; ++l)
                want += std::exp(-lambda[l] * times[i]) * phi(v, l) * phi(v, l);
            CHECK(par(v, i) == doctest::Approx(want).epsilon(1e-13));
        }
    }
}

TEST_CASE("nearest_two finds the two closest centroids, ties to the lower index") {
    Eigen::MatrixXd pts(3, 2);
    pts << 0.0, 0.0, 2.0, 0.0, 0.9, 0.0;
    Eigen::MatrixXd cen(3, 2);
    cen << -1.0, 0.0, 1.0, 0.0, 3.0, 0.0;
    Eigen::VectorXi n1, n2;
    Eigen::VectorXd d2;
    kernels::nearest_two(pts, cen, n1, n2, d2);

    // point 0 is equidistant from centroids 0 and 1
    CHECK(n1[0] == 0);
    CHECK(n2[0] == 1);
    CHECK(d2[0] == doctest::Approx(1.0));
    CHECK(n1[1] == 1);
    CHECK(n2[1] == 2);
    CHECK(n1[2] == 1);
    CHECK(n2[2] == 0);

    Eigen::MatrixXd one = cen.topRows(1);
    kernels::nearest_two(pts, one, n1, n2, d2);
    CHECK(n1[0] == 0);
    CHECK(n2[0] == -1);
}

TEST_CASE("nearest_two serial and parallel agree bit for bit") {
    Rng rng(5);
    Eigen::MatrixXd pts = random_matrix(rng, 501, 7, -2.0, 2.0);
    Eigen::MatrixXd cen = random_matrix(rng, 9, 7, -2.0, 2.0);
    Eigen::VectorXi a1, a2, b1, b2;
    Eigen::VectorXd da, db;
    kernels::nearest_two_serial(pts, cen, a1, a2, da);
    kernels::nearest_two(pts, cen, b1, b2, db);
    CHECK(a1 == b1);
    CHECK(a2 == b2);
    CHECK(da == db);
}

TEST_CASE("knn_neighbors returns sorted neighbors, excludes self, ties by index") {
    Eigen::MatrixX3d pts(5, 3);
    pts << 0, 0, 0, 1, 0, 0, -1, 0, 0, 2, 0, 0, 0, 3, 0;
    Eigen::MatrixXi nb;
    kernels::knn_neighbors(pts, 3, nb);
    // point 0: distance 1 to both 1 and 2 (tie -> index order), then 3 at distance 2
    CHECK(nb(0, 0) == 1);
    CHECK(nb(0, 1) == 2);
    CHECK(nb(0, 2) == 3);
    // point 3: 1 (d=1), 0 (d=2), 2 (d=3)
    CHECK(nb(3, 0) == 1);
    CHECK(nb(3, 1) == 0);
    CHECK(nb(3, 2) == 2);

    Eigen::MatrixXi ser;
    kernels::knn_neighbors_serial(pts, 3, ser);
    CHECK(nb == ser);

    Rng rng(3);
    Eigen::MatrixX3d cloud = random_matrix(rng, 300, 3, -1.0, 1.0);
    Eigen::MatrixXi a, b;
    kernels::knn_neighbors_serial(cloud, 6, a);
    kernels::knn_neighbors(cloud, 6, b);
    CHECK(a == b);
    for (int i = 0; i < cloud.rows(); ++i) {
        double prev = -1.0;
        for (int c = 0; c < 6; ++c) {
            CHECK(a(i, c) != i);
            const double dist = (cloud.row(a(i, c)) - cloud.row(i)).squaredNorm();
            CHECK(dist >= prev);
            prev = dist;
        }
    }
}

TEST_CASE("nearest_point matches a direct argmin") {
    Rng rng(17);
    Eigen::MatrixX3d q = random_matrix(rng, 64, 3, -1.0, 1.0);
    Eigen::MatrixX3d refs = random_matrix(rng, 41, 3, -1.0, 1.0);
    Eigen::VectorXi got, ser;
    kernels::nearest_point(q, refs, got);
    kernels::nearest_point_serial(q, refs, ser);
    CHECK(got == ser);
    for (int i = 0; i < q.rows(); ++i) {
        int arg = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int r = 0; r < refs.rows(); ++r) {
            const double d = (refs.row(r) - q.row(i)).squaredNorm();
            if (d < best) {
                best = d;
                arg = r;
            }
        }
        CHECK(got[i] == arg);
    }
}

TEST_CASE("matvec matches Eigen on symmetric input, serial twin bit-identical") {
    Rng rng(23);
    Eigen::MatrixXd m = random_matrix(rng, 130, 130, -1.0, 1.0);
    m = ((m + m.transpose()) * 0.5).eval();
    Eigen::VectorXd x = random_matrix(rng, 130, 1, -1.0, 1.0).col(0);
    Eigen::VectorXd a, b;
    kernels::matvec(m, x, a);
    kernels::matvec_serial(m, x, b);
    CHECK(a == b);
    const Eigen::VectorXd want = m * x;
    CHECK((a - want).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("affinity_offdiag fills exp(-(graph ddiff + cost diff)/sigma)") {
    const int na = 3, nb = 2;
    Eigen::MatrixXi da(na, na), db(nb, nb);
    da << 0, 1, 2, 1, 0, 1, 2, 1, 0;
    db << 0, 1, 1, 0;
    Eigen::MatrixXd cost(na, nb);
    cost << 0.1, 0.2, 0.3, 0.4, 0.5, 0.6;
    std::vector<char> active(na * nb, 1);
    const double sigma = 0.5;
    const double sentinel = -7.0;
    Eigen::MatrixXd m = Eigen::MatrixXd::Constant(na * nb, na * nb, sentinel);
    kernels::affinity_offdiag(da, db, cost, active, sigma, m);

    // diagonal untouched
    for (int r = 0; r < na * nb; ++r) CHECK(m(r, r) == sentinel);
    // row (i=0,j=0), col (k=1,l=1): |da(0,1)-db(0,1)| = 0, |0.1-0.4| = 0.3
    CHECK(m(0, 3) == doctest::Approx(std::exp(-0.3 / sigma)).epsilon(1e-15));
    // row (i=0,j=0), col (k=2,l=1): |2-1| = 1, |0.1-0.6| = 0.5
    CHECK(m(0, 5) == doctest::Approx(std::exp(-1.5 / sigma)).epsilon(1e-15));
    // symmetry of the filled part
    for (int r = 0; r < na * nb; ++r)
        for (int c = 0; c < na * nb; ++c)
            if (r != c) CHECK(m(r, c) == m(c, r));

    Eigen::MatrixXd ser = Eigen::MatrixXd::Constant(na * nb, na * nb, sentinel);
    kernels::affinity_offdiag_serial(da, db, cost, active, sigma, ser);
    CHECK(m == ser);
}

TEST_CASE("affinity_offdiag respects unreachable distances and pruning") {
    const int na = 2, nb = 2;
    Eigen::MatrixXi da(na, na), db(nb, nb);
    da << 0, -1, -1, 0; // disconnected pair on A
    db << 0, 1, 1, 0;
    Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(na, nb);
    std::vector<char> active(na * nb, 1);
    active[1] = 0; // prune candidate (0,1)
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(na * nb, na * nb);
    kernels::affinity_offdiag(da, db, cost, active, 0.5, m);

    // (0,0) vs (1,1): A-side unreachable, B-side reachable -> 0
    CHECK(m(0, 3) == 0.0);
    // pruned row and column stay zero
    for (int c = 0; c < na * nb; ++c) CHECK(m(1, c) == 0.0);
    for (int r = 0; r < na * nb; ++r) CHECK(m(r, 1) == 0.0);

    // both sides unreachable -> graph term drops, unary term remains
    Eigen::MatrixXi dbu(nb, nb);
    dbu << 0, -1, -1, 0;
    std::vector<char> all(na * nb, 1);
    Eigen::MatrixXd m2 = Eigen::MatrixXd::Zero(na * nb, na * nb);
    kernels::affinity_offdiag(da, dbu, cost, all, 0.5, m2);
    CHECK(m2(0, 3) == doctest::Approx(1.0)); // exp(0)
}
