// Times each hot kernel in its serial and OpenMP variants and checks that the
// two produce bit-identical output.
#include <chrono>
#include <cstdio>
#include <string>

#include <Eigen/Dense>
#include <omp.h>

#include "sgm/kernels.hpp"
#include "sgm/rng.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

Eigen::MatrixXd random_matrix(sgm::Rng& rng, int rows, int cols, double lo, double hi) {
    Eigen::MatrixXd m(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) m(i, j) = rng.uniform(lo, hi);
    return m;
}

struct Row {
    const char* name;
    double serial_s;
    double parallel_s;
    bool identical;
};

void print(const Row& r) {
    std::printf("%-18s serial %8.4f s   parallel %8.4f s   speedup %5.2fx   %s\n", r.name,
                r.serial_s, r.parallel_s, r.serial_s / r.parallel_s,
                r.identical ? "bit-identical" : "MISMATCH");
}

} // namespace

int main(int argc, char** argv) {
    const int scale = (argc > 1) ? std::stoi(argv[1]) : 1;
    std::printf("threads: %d, scale: %d\n", omp_get_max_threads(), scale);
    sgm::Rng rng(7);
    bool all_ok = true;

    {
        const int n = 20000 * scale, m = 150, d = 15;
        Eigen::VectorXd lambda = random_matrix(rng, m, 1, 0.0, 50.0).col(0);
        Eigen::MatrixXd phi = random_matrix(rng, n, m, -1.0, 1.0);
        Eigen::VectorXd times = random_matrix(rng, d, 1, 0.03, 0.25).col(0);
        Eigen::MatrixXd a, b;
        auto t0 = Clock::now();
        sgm::kernels::hks_table_serial(lambda, phi, times, a);
        const double ts = seconds_since(t0);
        t0 = Clock::now();
        sgm::kernels::hks_table(lambda, phi, times, b);
        Row r{"hks_table", ts, seconds_since(t0), a == b};
        print(r);
        all_ok = all_ok && r.identical;
    }
    {
        const int n = 200000 * scale, k = 10, d = 15;
        Eigen::MatrixXd pts = random_matrix(rng, n, d, -1.0, 1.0);
        Eigen::MatrixXd cen = random_matrix(rng, k, d, -1.0, 1.0);
        Eigen::VectorXi n1a, n2a, n1b, n2b;
        Eigen::VectorXd da, db;
        auto t0 = Clock::now();
        sgm::kernels::nearest_two_serial(pts, cen, n1a, n2a, da);
        const double ts = seconds_since(t0);
        t0 = Clock::now();
        sgm::kernels::nearest_two(pts, cen, n1b, n2b, db);
        Row r{"nearest_two", ts, seconds_since(t0), n1a == n1b && n2a == n2b && da == db};
        print(r);
        all_ok = all_ok && r.identical;
    }
    {
        const int n = 20000 * scale;
        Eigen::MatrixX3d pts = random_matrix(rng, n, 3, -1.0, 1.0);
        Eigen::MatrixXi a, b;
        auto t0 = Clock::now();
        sgm::kernels::knn_neighbors_serial(pts, 6, a);
        const double ts = seconds_since(t0);
        t0 = Clock::now();
        sgm::kernels::knn_neighbors(pts, 6, b);
        Row r{"knn_neighbors", ts, seconds_since(t0), a == b};
        print(r);
        all_ok = all_ok && r.identical;
    }
    {
        const int nq = 20000 * scale, nr = 20000;
        Eigen::MatrixX3d q = random_matrix(rng, nq, 3, -1.0, 1.0);
        Eigen::MatrixX3d refs = random_matrix(rng, nr, 3, -1.0, 1.0);
        Eigen::VectorXi a, b;
        auto t0 = Clock::now();
        sgm::kernels::nearest_point_serial(q, refs, a);
        const double ts = seconds_since(t0);
        t0 = Clock::now();
        sgm::kernels::nearest_point(q, refs, b);
        Row r{"nearest_point", ts, seconds_since(t0), a == b};
        print(r);
        all_ok = all_ok && r.identical;
    }
    {
        const int n = 3000 * scale;
        Eigen::MatrixXd m = random_matrix(rng, n, n, 0.0, 1.0);
        m = ((m + m.transpose()) * 0.5).eval();
        Eigen::VectorXd x = random_matrix(rng, n, 1, -1.0, 1.0).col(0);
        Eigen::VectorXd a, b;
        const int reps = 20;
        auto t0 = Clock::now();
        for (int rep = 0; rep < reps; ++rep) sgm::kernels::matvec_serial(m, x, a);
        const double ts = seconds_since(t0);
        t0 = Clock::now();
        for (int rep = 0; rep < reps; ++rep) sgm::kernels::matvec(m, x, b);
        Row r{"matvec", ts, seconds_since(t0), a == b};
        print(r);
        all_ok = all_ok && r.identical;
    }
    {
        const int na = 20, nb = 20;
        Eigen::MatrixXi dist_a(na, na), dist_b(nb, nb);
        for (int i = 0; i < na; ++i)
            for (int j = 0; j < na; ++j) dist_a(i, j) = (i + j) % 7;
        for (int i = 0; i < nb; ++i)
            for (int j = 0; j < nb; ++j) dist_b(i, j) = (i * j) % 5;
        Eigen::MatrixXd cost = random_matrix(rng, na, nb, 0.0, 3.0);
        std::vector<char> active(static_cast<std::size_t>(na) * nb, 1);
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(na * nb, na * nb);
        Eigen::MatrixXd b = Eigen::MatrixXd::Zero(na * nb, na * nb);
        const int reps = 5 * scale;
        auto t0 = Clock::now();
        for (int rep = 0; rep < reps; ++rep)
            sgm::kernels::affinity_offdiag_serial(dist_a, dist_b, cost, active, 0.5, a);
        const double ts = seconds_since(t0);
        t0 = Clock::now();
        for (int rep = 0; rep < reps; ++rep)
            sgm::kernels::affinity_offdiag(dist_a, dist_b, cost, active, 0.5, b);
        Row r{"affinity_offdiag", ts, seconds_since(t0), a == b};
        print(r);
        all_ok = all_ok && r.identical;
    }

    if (!all_ok) {
        std::printf("FAILED: serial and parallel kernels disagree\n");
        return 1;
    }
    return 0;
}
