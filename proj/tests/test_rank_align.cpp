#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sgm/rank_align.hpp"
#include "sgm/rng.hpp"

using namespace sgm;

namespace {

Eigen::MatrixXd random_matrix(Rng& rng, int rows, int cols, double lo, double hi) {
    Eigen::MatrixXd m(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) m(i, j) = rng.uniform(lo, hi);
    return m;
}

Eigen::VectorXd random_areas(Rng& rng, int n) {
    Eigen::VectorXd a(n);
    for (int i = 0; i < n; ++i) a[i] = rng.uniform(0.1, 2.0);
    return a / a.sum();
}

} // namespace

TEST_CASE("aligning a distribution onto itself is the bit-exact identity") {
    Rng rng(42);
    Eigen::MatrixXd x = random_matrix(rng, 200, 5, -3.0, 9.0);
    Eigen::VectorXd a = random_areas(rng, 200);
    Eigen::MatrixXd aligned = rank_align(x, a, x, a);
    CHECK(aligned == x);
}

TEST_CASE("strictly monotone transforms of the source do not change the output") {
    Rng rng(4);
    Eigen::MatrixXd x = random_matrix(rng, 150, 3, 0.1, 4.0);
    Eigen::VectorXd ax = random_areas(rng, 150);
    Eigen::MatrixXd ref = random_matrix(rng, 80, 3, -1.0, 2.0);
    Eigen::VectorXd ar = random_areas(rng, 80);

    Eigen::MatrixXd base = rank_align(x, ax, ref, ar);
    Eigen::MatrixXd cubed = (x.array().pow(3) + 2.0 * x.array()).matrix();
    CHECK(rank_align(cubed, ax, ref, ar) == base);
    Eigen::MatrixXd logged = x.array().log().matrix();
    CHECK(rank_align(logged, ax, ref, ar) == base);
}

TEST_CASE("hand-computed quantile remap") {
    // ref: half the area at 0, half at 10 -> midpoints 0.25 and 0.75
    Eigen::MatrixXd ref(2, 1);
    ref << 0.0, 10.0;
    Eigen::VectorXd ar(2);
    ar << 0.5, 0.5;
    // src midpoint positions: 1/6, 1/2, 5/6
    Eigen::MatrixXd src(3, 1);
    src << 1.0, 2.0, 3.0;
    Eigen::VectorXd as = Eigen::VectorXd::Constant(3, 1.0 / 3.0);

    Eigen::MatrixXd out = rank_align(src, as, ref, ar);
    CHECK(out(0, 0) == doctest::Approx(0.0));  // below ref's first midpoint
    CHECK(out(1, 0) == doctest::Approx(5.0));  // interpolated halfway
    CHECK(out(2, 0) == doctest::Approx(10.0)); // above ref's last midpoint
}

TEST_CASE("tied source values share one aligned value") {
    Eigen::MatrixXd src(3, 1);
    src << 1.0, 1.0, 2.0;
    Eigen::VectorXd as = Eigen::VectorXd::Constant(3, 1.0 / 3.0);
    Eigen::MatrixXd ref(4, 1);
    ref << 0.0, 1.0, 2.0, 3.0;
    Eigen::VectorXd ar = Eigen::VectorXd::Constant(4, 0.25);

    Eigen::MatrixXd out = rank_align(src, as, ref, ar);
    CHECK(out(0, 0) == out(1, 0));
    CHECK(out(2, 0) > out(0, 0));
}

TEST_CASE("alignment is monotone and lands inside the reference range") {
    Rng rng(9);
    Eigen::MatrixXd x = random_matrix(rng, 120, 2, -5.0, 5.0);
    Eigen::VectorXd ax = random_areas(rng, 120);
    Eigen::MatrixXd ref = random_matrix(rng, 60, 2, 100.0, 200.0);
    Eigen::VectorXd ar = random_areas(rng, 60);

    Eigen::MatrixXd out = rank_align(x, ax, ref, ar);
    for (int c = 0; c < 2; ++c) {
        CHECK(out.col(c).minCoeff() >= ref.col(c).minCoeff());
        CHECK(out.col(c).maxCoeff() <= ref.col(c).maxCoeff());
        for (int i = 0; i < x.rows(); ++i)
            for (int j = 0; j < x.rows(); ++j)
                if (x(i, c) < x(j, c)) CHECK(out(i, c) <= out(j, c));
    }
}

TEST_CASE("constant channels map to the reference value") {
    Eigen::MatrixXd src = Eigen::MatrixXd::Constant(5, 1, 3.0);
    Eigen::VectorXd as = Eigen::VectorXd::Constant(5, 0.2);
    Eigen::MatrixXd ref(2, 1);
    ref << 7.0, 9.0;
    Eigen::VectorXd ar(2);
    ar << 0.5, 0.5;
    Eigen::MatrixXd out = rank_align(src, as, ref, ar);
    // src position 0.5 interpolates ref midpoints 0.25/0.75 exactly halfway
    for (int i = 0; i < 5; ++i) CHECK(out(i, 0) == doctest::Approx(8.0));
}
