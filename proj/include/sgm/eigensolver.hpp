#pragma once

#include <Eigen/Dense>

#include "sgm/laplacian.hpp"

namespace sgm {

// First m generalized eigenpairs of S phi = lambda M phi, ascending.
// Eigenfunctions are M-orthonormal; the sign is fixed so the first entry with
// magnitude above 1e-12 * max is positive.
struct EigenDecomposition {
    Eigen::VectorXd eigenvalues;    // size m
    Eigen::MatrixXd eigenfunctions; // n x m
};

enum class EigenMethod {
    Auto,    // dense below ~1k vertices, shift-invert Lanczos above
    Dense,
    Lanczos,
};

EigenDecomposition eigendecompose(const Laplacian& lap, int m,
                                  EigenMethod method = EigenMethod::Auto);

// max over pairs of |S phi - lambda M phi|_2 / |phi|_2
double max_residual(const Laplacian& lap, const EigenDecomposition& eig);

} // namespace sgm
