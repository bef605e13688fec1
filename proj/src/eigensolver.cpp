#include "sgm/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/SparseCholesky>

#include "sgm/error.hpp"
#include "sgm/rng.hpp"

namespace sgm {

namespace {

constexpr int kDenseLimit = 1024;
constexpr double kResidualTarget = 1e-8;

void fix_signs(Eigen::MatrixXd& phi) {
    for (int c = 0; c < phi.cols(); ++c) {
        const double peak = phi.col(c).cwiseAbs().maxCoeff();
        const double cut = 1e-12 * peak;
        for (int r = 0; r < phi.rows(); ++r) {
            const double v = phi(r, c);
            if (std::abs(v) > cut) {
                if (v < 0.0) phi.col(c) = -phi.col(c);
                break;
            }
        }
    }
}

// Symmetric whitening A = M^{-1/2} S M^{-1/2} keeps sparsity (M is diagonal).
Eigen::SparseMatrix<double> whiten(const Laplacian& lap) {
    const Eigen::VectorXd inv_sqrt = lap.mass.cwiseSqrt().cwiseInverse();
    Eigen::SparseMatrix<double> a = lap.stiffness;
    for (int k = 0; k < a.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(a, k); it; ++it)
            it.valueRef() *= inv_sqrt[it.row()] * inv_sqrt[it.col()];
    return a;
}

EigenDecomposition unwhiten(const Laplacian& lap, Eigen::VectorXd values,
                            Eigen::MatrixXd psi) {
    EigenDecomposition out;
    out.eigenvalues = std::move(values);
    const Eigen::VectorXd inv_sqrt = lap.mass.cwiseSqrt().cwiseInverse();
    out.eigenfunctions = inv_sqrt.asDiagonal() * psi;
    fix_signs(out.eigenfunctions);
    return out;
}

EigenDecomposition dense_path(const Laplacian& lap, int m) {
    const Eigen::MatrixXd a = Eigen::MatrixXd(whiten(lap));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
    if (solver.info() != Eigen::Success) throw PipelineError("dense eigensolver failed");
    return unwhiten(lap, solver.eigenvalues().head(m), solver.eigenvectors().leftCols(m));
}

// Shift-invert Lanczos with full reorthogonalization on B = A + tau*I.
// The top Ritz pairs of B^{-1} are the bottom eigenpairs of A.
EigenDecomposition lanczos_path(const Laplacian& lap, int m, int ncv, std::uint64_t seed) {
    const int n = static_cast<int>(lap.mass.size());
    Eigen::SparseMatrix<double> a = whiten(lap);
    double diag_mean = 0.0;
    for (int i = 0; i < n; ++i) diag_mean += a.coeff(i, i);
    diag_mean /= n;
    const double tau = 1e-4 * diag_mean;

    Eigen::SparseMatrix<double> b = a;
    for (int i = 0; i < n; ++i) b.coeffRef(i, i) += tau;
    b.makeCompressed();
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol(b);
    if (chol.info() != Eigen::Success) throw PipelineError("shifted laplacian factorization failed");

    ncv = std::min(ncv, n);
    Eigen::MatrixXd v(n, ncv);
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(ncv);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(ncv);

    Rng rng(seed);
    Eigen::VectorXd w(n);
    for (int i = 0; i < n; ++i) w[i] = rng.uniform(-1.0, 1.0);
    w.normalize();
    v.col(0) = w;

    int steps = 0;
    for (int j = 0; j < ncv; ++j) {
        w = chol.solve(v.col(j));
        if (j > 0) w -= beta[j - 1] * v.col(j - 1);
        alpha[j] = v.col(j).dot(w);
        w -= alpha[j] * v.col(j);
        // full reorthogonalization, twice
        for (int pass = 0; pass < 2; ++pass)
            w -= v.leftCols(j + 1) * (v.leftCols(j + 1).transpose() * w);
        steps = j + 1;
        if (j + 1 == ncv) break;
        const double norm = w.norm();
        if (norm < 1e-14) {
            // invariant subspace hit; continue from a fresh direction
            for (int i = 0; i < n; ++i) w[i] = rng.uniform(-1.0, 1.0);
            for (int pass = 0; pass < 2; ++pass)
                w -= v.leftCols(j + 1) * (v.leftCols(j + 1).transpose() * w);
            w.normalize();
            beta[j] = 0.0;
        } else {
            beta[j] = norm;
            w /= norm;
        }
        v.col(j + 1) = w;
    }

    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(steps, steps);
    for (int j = 0; j < steps; ++j) {
        t(j, j) = alpha[j];
        if (j + 1 < steps) {
            t(j, j + 1) = beta[j];
            t(j + 1, j) = beta[j];
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(t);
    if (solver.info() != Eigen::Success) throw PipelineError("lanczos projection failed");

    // Largest theta of B^{-1} correspond to the smallest lambda of A.
    Eigen::VectorXd values(m);
    Eigen::MatrixXd psi(n, m);
    for (int i = 0; i < m; ++i) {
        const int src = steps - 1 - i;
        const double theta = solver.eigenvalues()[src];
        if (theta <= 0.0) throw PipelineError("lanczos produced a non-positive ritz value");
        values[i] = 1.0 / theta - tau;
        psi.col(i) = v.leftCols(steps) * solver.eigenvectors().col(src);
        psi.col(i).normalize();
    }
    return unwhiten(lap, std::move(values), std::move(psi));
}

} // namespace

double max_residual(const Laplacian& lap, const EigenDecomposition& eig) {
    double worst = 0.0;
    for (int i = 0; i < eig.eigenvalues.size(); ++i) {
        const Eigen::VectorXd phi = eig.eigenfunctions.col(i);
        const Eigen::VectorXd r =
            lap.stiffness * phi - eig.eigenvalues[i] * lap.mass.cwiseProduct(phi);
        worst = std::max(worst, r.norm() / phi.norm());
    }
    return worst;
}

EigenDecomposition eigendecompose(const Laplacian& lap, int m, EigenMethod method) {
    const int n = static_cast<int>(lap.mass.size());
    if (m < 1 || m > n) throw PipelineError("bad eigenpair count");

    const bool dense = method == EigenMethod::Dense ||
                       (method == EigenMethod::Auto && n <= kDenseLimit);
    if (dense) {
        EigenDecomposition eig = dense_path(lap, m);
        if (max_residual(lap, eig) > kResidualTarget)
            throw PipelineError("dense eigenpairs exceed the residual target");
        return eig;
    }

    int ncv = std::min(n, 2 * m + 20);
    for (int attempt = 0; attempt < 3; ++attempt) {
        EigenDecomposition eig = lanczos_path(lap, m, ncv, 0x5eed0000u + attempt);
        if (max_residual(lap, eig) <= kResidualTarget) return eig;
        ncv = std::min(n, ncv + ncv / 2);
    }
    throw PipelineError("lanczos eigenpairs exceed the residual target");
}

} // namespace sgm
