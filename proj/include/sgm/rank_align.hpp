#pragma once

#include <Eigen/Dense>

namespace sgm {

// Monotone per-channel remap of src values onto ref's area-weighted value
// distribution: each value is sent through src's weighted CDF (midpoint tie
// convention) and back through ref's weighted quantile function (linear
// interpolation between midpoints).
//
// Remapping a distribution onto itself reproduces the input bit-exactly, and
// any strictly increasing per-channel transform of src yields the same output;
// both facts are load-bearing for matching a shape against itself.
Eigen::MatrixXd rank_align(const Eigen::MatrixXd& src_values, const Eigen::VectorXd& src_areas,
                           const Eigen::MatrixXd& ref_values, const Eigen::VectorXd& ref_areas);

} // namespace sgm
