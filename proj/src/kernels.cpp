#include "sgm/kernels.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#if defined(__GNUC__)
#define SGM_NOINLINE __attribute__((noinline))
#else
#define SGM_NOINLINE
#endif

namespace sgm::kernels {

namespace {

// Per-element routines are out-of-line so the serial and OpenMP loops share
// one compiled body (same rounding, same fma contraction).

SGM_NOINLINE double hks_entry(const double* lambda, const double* phi_row, int m,
                              int ld, double t) {
    double acc = 0.0;
    for (int l = 0; l < m; ++l) {
        const double phi = phi_row[static_cast<std::ptrdiff_t>(l) * ld];
        acc += std::exp(-lambda[l] * t) * phi * phi;
    }
    return acc;
}

SGM_NOINLINE void nearest_two_entry(const double* p, const Eigen::MatrixXd& centroids,
                                    int& nearest, int& second, double& best) {
    const int k = static_cast<int>(centroids.rows());
    const int d = static_cast<int>(centroids.cols());
    best = std::numeric_limits<double>::infinity();
    double second_best = std::numeric_limits<double>::infinity();
    nearest = -1;
    second = -1;
    for (int j = 0; j < k; ++j) {
        double dist = 0.0;
        for (int c = 0; c < d; ++c) {
            const double diff = p[c] - centroids(j, c);
            dist += diff * diff;
        }
        if (dist < best) {
            second_best = best;
            second = nearest;
            best = dist;
            nearest = j;
        } else if (dist < second_best) {
            second_best = dist;
            second = j;
        }
    }
}

SGM_NOINLINE int nearest_point_entry(const Eigen::RowVector3d& q, const Eigen::MatrixX3d& refs) {
    const int n = static_cast<int>(refs.rows());
    double best = std::numeric_limits<double>::infinity();
    int arg = -1;
    for (int i = 0; i < n; ++i) {
        const double dist = (refs.row(i) - q).squaredNorm();
        if (dist < best) {
            best = dist;
            arg = i;
        }
    }
    return arg;
}

SGM_NOINLINE void knn_entry(const Eigen::MatrixX3d& points, int i, int k, int* out) {
    const int n = static_cast<int>(points.rows());
    // Insertion into a small sorted buffer; k is 6 in practice.
    std::vector<std::pair<double, int>> best(static_cast<std::size_t>(k),
                                             {std::numeric_limits<double>::infinity(), -1});
    for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        const double dist = (points.row(j) - points.row(i)).squaredNorm();
        if (dist >= best.back().first) continue;
        int pos = k - 1;
        while (pos > 0 && best[pos - 1].first > dist) {
            best[pos] = best[pos - 1];
            --pos;
        }
        best[pos] = {dist, j};
    }
    for (int c = 0; c < k; ++c) out[c] = best[c].second;
}

SGM_NOINLINE double matvec_entry(const double* row, const double* x, int n) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) acc += row[j] * x[j];
    return acc;
}

SGM_NOINLINE double affinity_entry(int da, int db, double c_ij, double c_kl, double sigma) {
    // Both nodes unreachable on their own graph: no distance evidence.
    double dg;
    if (da < 0 && db < 0) {
        dg = 0.0;
    } else if (da < 0 || db < 0) {
        return 0.0;
    } else {
        dg = std::abs(static_cast<double>(da) - static_cast<double>(db));
    }
    const double du = std::abs(c_ij - c_kl);
    return std::exp(-(dg + du) / sigma);
}

void affinity_row(int row, int na, int nb, const Eigen::MatrixXi& dist_a,
                  const Eigen::MatrixXi& dist_b, const Eigen::MatrixXd& unary_cost,
                  const std::vector<char>& active, double sigma, Eigen::MatrixXd& m) {
    const int i = row / nb;
    const int j = row % nb;
    if (!active[static_cast<std::size_t>(row)]) return;
    const double c_ij = unary_cost(i, j);
    for (int col = 0; col < na * nb; ++col) {
        if (col == row || !active[static_cast<std::size_t>(col)]) continue;
        const int k = col / nb;
        const int l = col % nb;
        m(row, col) = affinity_entry(dist_a(i, k), dist_b(j, l), c_ij, unary_cost(k, l), sigma);
    }
}

} // namespace

void hks_table_serial(const Eigen::VectorXd& eigenvalues, const Eigen::MatrixXd& eigenfunctions,
                      const Eigen::VectorXd& times, Eigen::MatrixXd& out) {
    const int n = static_cast<int>(eigenfunctions.rows());
    const int m = static_cast<int>(eigenfunctions.cols());
    const int d = static_cast<int>(times.size());
    const int ld = static_cast<int>(eigenfunctions.outerStride());
    out.resize(n, d);
    for (int v = 0; v < n; ++v)
        for (int i = 0; i < d; ++i)
            out(v, i) = hks_entry(eigenvalues.data(), eigenfunctions.data() + v, m, ld, times[i]);
}

void hks_table(const Eigen::VectorXd& eigenvalues, const Eigen::MatrixXd& eigenfunctions,
               const Eigen::VectorXd& times, Eigen::MatrixXd& out) {
    const int n = static_cast<int>(eigenfunctions.rows());
    const int m = static_cast<int>(eigenfunctions.cols());
    const int d = static_cast<int>(times.size());
    const int ld = static_cast<int>(eigenfunctions.outerStride());
    out.resize(n, d);
#pragma omp parallel for schedule(static)
    for (int v = 0; v < n; ++v)
        for (int i = 0; i < d; ++i)
            out(v, i) = hks_entry(eigenvalues.data(), eigenfunctions.data() + v, m, ld, times[i]);
}

void nearest_two_serial(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centroids,
                        Eigen::VectorXi& nearest, Eigen::VectorXi& second, Eigen::VectorXd& dist2) {
    const int n = static_cast<int>(points.rows());
    const int d = static_cast<int>(points.cols());
    nearest.resize(n);
    second.resize(n);
    dist2.resize(n);
    std::vector<double> row(static_cast<std::size_t>(d));
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < d; ++c) row[static_cast<std::size_t>(c)] = points(i, c);
        nearest_two_entry(row.data(), centroids, nearest[i], second[i], dist2[i]);
    }
}

void nearest_two(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centroids,
                 Eigen::VectorXi& nearest, Eigen::VectorXi& second, Eigen::VectorXd& dist2) {
    const int n = static_cast<int>(points.rows());
    const int d = static_cast<int>(points.cols());
    nearest.resize(n);
    second.resize(n);
    dist2.resize(n);
#pragma omp parallel
    {
        std::vector<double> row(static_cast<std::size_t>(d));
#pragma omp for schedule(static)
        for (int i = 0; i < n; ++i) {
            for (int c = 0; c < d; ++c) row[static_cast<std::size_t>(c)] = points(i, c);
            nearest_two_entry(row.data(), centroids, nearest[i], second[i], dist2[i]);
        }
    }
}

void nearest_point_serial(const Eigen::MatrixX3d& queries, const Eigen::MatrixX3d& refs,
                          Eigen::VectorXi& out) {
    const int n = static_cast<int>(queries.rows());
    out.resize(n);
    for (int i = 0; i < n; ++i) out[i] = nearest_point_entry(queries.row(i), refs);
}

void nearest_point(const Eigen::MatrixX3d& queries, const Eigen::MatrixX3d& refs,
                   Eigen::VectorXi& out) {
    const int n = static_cast<int>(queries.rows());
    out.resize(n);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) out[i] = nearest_point_entry(queries.row(i), refs);
}

void knn_neighbors_serial(const Eigen::MatrixX3d& points, int k, Eigen::MatrixXi& out) {
    const int n = static_cast<int>(points.rows());
    out.resize(n, k);
    std::vector<int> buf(static_cast<std::size_t>(k));
    for (int i = 0; i < n; ++i) {
        knn_entry(points, i, k, buf.data());
        for (int c = 0; c < k; ++c) out(i, c) = buf[static_cast<std::size_t>(c)];
    }
}

void knn_neighbors(const Eigen::MatrixX3d& points, int k, Eigen::MatrixXi& out) {
    const int n = static_cast<int>(points.rows());
    out.resize(n, k);
#pragma omp parallel
    {
        std::vector<int> buf(static_cast<std::size_t>(k));
#pragma omp for schedule(static)
        for (int i = 0; i < n; ++i) {
            knn_entry(points, i, k, buf.data());
            for (int c = 0; c < k; ++c) out(i, c) = buf[static_cast<std::size_t>(c)];
        }
    }
}

void matvec_serial(const Eigen::MatrixXd& a, const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    const int n = static_cast<int>(a.cols());
    y.resize(n);
    // a is symmetric, so row i equals column i; columns are contiguous.
    for (int i = 0; i < n; ++i)
        y[i] = matvec_entry(a.col(i).data(), x.data(), static_cast<int>(a.rows()));
}

void matvec(const Eigen::MatrixXd& a, const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    const int n = static_cast<int>(a.cols());
    y.resize(n);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i)
        y[i] = matvec_entry(a.col(i).data(), x.data(), static_cast<int>(a.rows()));
}

void affinity_offdiag_serial(const Eigen::MatrixXi& dist_a, const Eigen::MatrixXi& dist_b,
                             const Eigen::MatrixXd& unary_cost, const std::vector<char>& active,
                             double sigma, Eigen::MatrixXd& m) {
    const int na = static_cast<int>(dist_a.rows());
    const int nb = static_cast<int>(dist_b.rows());
    for (int row = 0; row < na * nb; ++row)
        affinity_row(row, na, nb, dist_a, dist_b, unary_cost, active, sigma, m);
}

void affinity_offdiag(const Eigen::MatrixXi& dist_a, const Eigen::MatrixXi& dist_b,
                      const Eigen::MatrixXd& unary_cost, const std::vector<char>& active,
                      double sigma, Eigen::MatrixXd& m) {
    const int na = static_cast<int>(dist_a.rows());
    const int nb = static_cast<int>(dist_b.rows());
#pragma omp parallel for schedule(static)
    for (int row = 0; row < na * nb; ++row)
        affinity_row(row, na, nb, dist_a, dist_b, unary_cost, active, sigma, m);
}

} // namespace sgm::kernels
