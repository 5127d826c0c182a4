#pragma once

#include <Eigen/Core>
#include <complex>
#include <optional>

namespace torusphase {

/// Full spectrum of a dense matrix, ordered by (Re, Im) ascending.
struct ComplexSpectrum {
    Eigen::VectorXcd eigenvalues;
    std::optional<Eigen::MatrixXcd> eigenvectors;  // columns match eigenvalues
    Eigen::VectorXd residuals;   // per-eigenvalue ||A x - l x|| / (||A||_F ||x||); empty without vectors
    double residual = 0.0;       // max of residuals, 0 when vectors were not requested
    int dim = 0;
    bool converged = false;
};

/// Complete eigendecomposition of a dense complex matrix (LAPACK zgeev behind
/// the scenes, single BLAS thread).  Deterministic ordering by (Re, Im).
/// Non-convergence is reported through ComplexSpectrum::converged; the
/// partial content must then be treated as unusable.
ComplexSpectrum eig_general(const Eigen::MatrixXcd& A, bool compute_vectors = true);

/// Ascending eigenvalues of a dense real symmetric matrix.  Throws
/// std::invalid_argument when the input deviates from symmetry by more than
/// 1e-12 relative, std::runtime_error on solver failure.
Eigen::VectorXd eig_symmetric(const Eigen::MatrixXd& S);

/// As eig_symmetric, additionally returning orthonormal eigenvectors.
struct SymmetricSpectrum {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;
};
SymmetricSpectrum eig_symmetric_full(const Eigen::MatrixXd& S);

/// Recomputes the max relative eigenpair residual from scratch, independent
/// of anything stored in the spectrum.  Requires eigenvectors.
double validate(const Eigen::MatrixXcd& A, const ComplexSpectrum& spectrum);

}  // namespace torusphase
