#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

// Hot inner loops of the pipeline. Each kernel exists twice: an OpenMP
// version (the production entry point) and a *_serial reference. The parallel
// loops split over independent output elements and every element is computed
// by the same out-of-line routine with a fixed summation order, so both
// versions produce bit-identical results; tests and tools/bench_kernels rely
// on that.
namespace sgm::kernels {

// out(v, i) = sum_l exp(-eigenvalue_l * times_i) * eigenfunctions(v, l)^2
void hks_table(const Eigen::VectorXd& eigenvalues, const Eigen::MatrixXd& eigenfunctions,
               const Eigen::VectorXd& times, Eigen::MatrixXd& out);
void hks_table_serial(const Eigen::VectorXd& eigenvalues, const Eigen::MatrixXd& eigenfunctions,
                      const Eigen::VectorXd& times, Eigen::MatrixXd& out);

// Nearest and second-nearest centroid per point (ties keep the lower index).
// With a single centroid, second is filled with -1.
void nearest_two(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centroids,
                 Eigen::VectorXi& nearest, Eigen::VectorXi& second, Eigen::VectorXd& dist2);
void nearest_two_serial(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centroids,
                        Eigen::VectorXi& nearest, Eigen::VectorXi& second, Eigen::VectorXd& dist2);

// Index of the closest reference point for every query point.
void nearest_point(const Eigen::MatrixX3d& queries, const Eigen::MatrixX3d& refs,
                   Eigen::VectorXi& out);
void nearest_point_serial(const Eigen::MatrixX3d& queries, const Eigen::MatrixX3d& refs,
                          Eigen::VectorXi& out);

// k nearest neighbors (excluding self) per point, by ascending distance;
// ties broken by index.
void knn_neighbors(const Eigen::MatrixX3d& points, int k, Eigen::MatrixXi& out);
void knn_neighbors_serial(const Eigen::MatrixX3d& points, int k, Eigen::MatrixXi& out);

// y = A * x for symmetric A, with a fixed per-row accumulation order.
void matvec(const Eigen::MatrixXd& a, const Eigen::VectorXd& x, Eigen::VectorXd& y);
void matvec_serial(const Eigen::MatrixXd& a, const Eigen::VectorXd& x, Eigen::VectorXd& y);

// Off-diagonal affinity fill for the graph-matching matrix. Candidate pair
// (i, j) maps to row i*nb + j. dist_a/dist_b hold unweighted graph distances
// (-1 = unreachable); unary_cost is the histogram-difference cost table;
// active flags pruned candidates. Entries are the raw (unscaled) affinities;
// the diagonal is left untouched.
void affinity_offdiag(const Eigen::MatrixXi& dist_a, const Eigen::MatrixXi& dist_b,
                      const Eigen::MatrixXd& unary_cost, const std::vector<char>& active,
                      double sigma, Eigen::MatrixXd& m);
void affinity_offdiag_serial(const Eigen::MatrixXi& dist_a, const Eigen::MatrixXi& dist_b,
                             const Eigen::MatrixXd& unary_cost, const std::vector<char>& active,
                             double sigma, Eigen::MatrixXd& m);

} // namespace sgm::kernels
