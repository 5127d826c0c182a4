#include "torusphase/eigensolve.hpp"

#include <algorithm>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <lapacke.h>

extern "C" void openblas_set_num_threads(int);

namespace torusphase {

namespace {

// Solves run on one BLAS thread; concurrency happens across solves.
void pin_blas_threads() {
    static std::once_flag flag;
    std::call_once(flag, [] { openblas_set_num_threads(1); });
}

std::vector<int> sort_order(const Eigen::VectorXcd& vals) {
    std::vector<int> idx(vals.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        if (vals[a].real() != vals[b].real()) return vals[a].real() < vals[b].real();
        return vals[a].imag() < vals[b].imag();
    });
    return idx;
}

}  // namespace

ComplexSpectrum eig_general(const Eigen::MatrixXcd& A, bool compute_vectors) {
    if (A.rows() != A.cols()) throw std::invalid_argument("eig_general: matrix must be square");
    if (!A.allFinite()) throw std::invalid_argument("eig_general: matrix has non-finite entries");
    pin_blas_threads();

    const int n = static_cast<int>(A.rows());
    ComplexSpectrum out;
    out.dim = n;
    if (n == 0) {
        out.converged = true;
        return out;
    }

    Eigen::MatrixXcd work = A;  // zgeev overwrites its input
    Eigen::VectorXcd vals(n);
    Eigen::MatrixXcd vecs;
    if (compute_vectors) vecs.resize(n, n);

    const int info = LAPACKE_zgeev(
        LAPACK_COL_MAJOR, 'N', compute_vectors ? 'V' : 'N', n,
        reinterpret_cast<lapack_complex_double*>(work.data()), n,
        reinterpret_cast<lapack_complex_double*>(vals.data()), nullptr, 1,
        compute_vectors ? reinterpret_cast<lapack_complex_double*>(vecs.data()) : nullptr,
        compute_vectors ? n : 1);
    if (info < 0) throw std::runtime_error("eig_general: illegal argument to zgeev");
    out.converged = (info == 0);

    const auto order = sort_order(vals);
    out.eigenvalues.resize(n);
    for (int i = 0; i < n; ++i) out.eigenvalues[i] = vals[order[i]];

    if (compute_vectors) {
        Eigen::MatrixXcd sorted(n, n);
        for (int i = 0; i < n; ++i) sorted.col(i) = vecs.col(order[i]);
        out.eigenvectors = std::move(sorted);

        const double norm_a = A.norm();
        Eigen::MatrixXcd resid = A * (*out.eigenvectors);
        out.residuals.resize(n);
        for (int i = 0; i < n; ++i) {
            resid.col(i) -= out.eigenvalues[i] * out.eigenvectors->col(i);
            const double xn = out.eigenvectors->col(i).norm();
            out.residuals[i] = resid.col(i).norm() / (norm_a * (xn > 0.0 ? xn : 1.0));
        }
        out.residual = out.residuals.maxCoeff();
    }
    return out;
}

namespace {

Eigen::MatrixXd checked_symmetric_copy(const Eigen::MatrixXd& S) {
    if (S.rows() != S.cols()) throw std::invalid_argument("eig_symmetric: matrix must be square");
    const double scale = S.cwiseAbs().maxCoeff();
    const double asym = (S - S.transpose()).cwiseAbs().maxCoeff();
    if (scale > 0.0 && asym > 1e-12 * scale)
        throw std::invalid_argument("eig_symmetric: input asymmetric beyond 1e-12 relative");
    return S;
}

}  // namespace

Eigen::VectorXd eig_symmetric(const Eigen::MatrixXd& S) {
    pin_blas_threads();
    Eigen::MatrixXd work = checked_symmetric_copy(S);
    const int n = static_cast<int>(work.rows());
    Eigen::VectorXd vals(n);
    const int info = LAPACKE_dsyev(LAPACK_COL_MAJOR, 'N', 'L', n, work.data(), n, vals.data());
    if (info != 0) throw std::runtime_error("eig_symmetric: dsyev failed, info=" + std::to_string(info));
    return vals;  // dsyev returns ascending order
}

SymmetricSpectrum eig_symmetric_full(const Eigen::MatrixXd& S) {
    pin_blas_threads();
    Eigen::MatrixXd work = checked_symmetric_copy(S);
    const int n = static_cast<int>(work.rows());
    Eigen::VectorXd vals(n);
    const int info = LAPACKE_dsyev(LAPACK_COL_MAJOR, 'V', 'L', n, work.data(), n, vals.data());
    if (info != 0) throw std::runtime_error("eig_symmetric: dsyev failed, info=" + std::to_string(info));
    return SymmetricSpectrum{std::move(vals), std::move(work)};
}

double validate(const Eigen::MatrixXcd& A, const ComplexSpectrum& spectrum) {
    if (!spectrum.eigenvectors)
        throw std::invalid_argument("validate: spectrum carries no eigenvectors");
    const Eigen::MatrixXcd& X = *spectrum.eigenvectors;
    const double norm_a = A.norm();
    double worst = 0.0;
    for (int i = 0; i < X.cols(); ++i) {
        const double xn = X.col(i).norm();
        const double res =
            (A * X.col(i) - spectrum.eigenvalues[i] * X.col(i)).norm() / (norm_a * (xn > 0.0 ? xn : 1.0));
        worst = std::max(worst, res);
    }
    return worst;
}

}  // namespace torusphase
