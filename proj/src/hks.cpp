#include "sgm/hks.hpp"

#include <algorithm>
#include <cmath>

#include "sgm/error.hpp"
#include "sgm/kernels.hpp"
#include "sgm/laplacian.hpp"

namespace sgm {

Eigen::VectorXd hks_times(const HksParams& params) {
    if (params.t_steps < 1) throw InputError("descriptor needs at least one time step");
    if (!(params.t_min > 0.0) || params.t_max < params.t_min)
        throw InputError("bad diffusion time range");
    Eigen::VectorXd times(params.t_steps);
    if (params.t_steps == 1) {
        times[0] = params.t_min;
        return times;
    }
    const double lo = std::log(params.t_min);
    const double hi = std::log(params.t_max);
    for (int i = 0; i < params.t_steps; ++i)
        times[i] = std::exp(lo + (hi - lo) * i / (params.t_steps - 1));
    return times;
}

Eigen::MatrixXd hks_from_eigen(const EigenDecomposition& eig, const Eigen::VectorXd& times) {
    Eigen::MatrixXd out;
    kernels::hks_table(eig.eigenvalues, eig.eigenfunctions, times, out);
    return out;
}

Eigen::MatrixXd compute_hks(const Shape& shape, const HksParams& params) {
    const Laplacian lap = build_laplacian(shape);
    const int m = std::min(shape.n() - 1, params.max_eigenpairs);
    const EigenDecomposition eig = eigendecompose(lap, m);
    return hks_from_eigen(eig, hks_times(params));
}

} // namespace sgm
