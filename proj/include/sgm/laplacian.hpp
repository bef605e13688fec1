#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "sgm/shape.hpp"

namespace sgm {

// Generalized Laplacian pair: stiffness S (symmetric, rows sum to zero) and a
// lumped diagonal mass M (positive, sums to 1). Eigenproblem: S phi = lambda M phi.
struct Laplacian {
    Eigen::SparseMatrix<double> stiffness;
    Eigen::VectorXd mass;
};

// Meshes: cotangent stiffness (negative weights for obtuse edges are kept) and
// one-third barycentric mass. Point clouds: Gaussian weights
// w_ab = exp(-|p_a-p_b|^2 / (2 h^2)) on the symmetrized kNN graph, where h is
// the mean edge length, degree-minus-weight stiffness and uniform mass.
Laplacian build_laplacian(const Shape& shape);

} // namespace sgm
