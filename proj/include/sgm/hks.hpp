#pragma once

#include <Eigen/Dense>

#include "sgm/eigensolver.hpp"
#include "sgm/shape.hpp"

namespace sgm {

struct HksParams {
    int t_steps = 15;
    double t_min = 0.03;
    double t_max = 0.25;
    int max_eigenpairs = 150;
};

// Log-spaced diffusion times in [t_min, t_max].
Eigen::VectorXd hks_times(const HksParams& params);

// Heat kernel signature row per vertex: HKS_t(v) = sum_l exp(-lambda_l t) phi_l(v)^2
// over the first min(n-1, max_eigenpairs) Laplacian eigenpairs.
Eigen::MatrixXd hks_from_eigen(const EigenDecomposition& eig, const Eigen::VectorXd& times);
Eigen::MatrixXd compute_hks(const Shape& shape, const HksParams& params = {});

} // namespace sgm
