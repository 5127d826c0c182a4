#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "torusphase/eigensolve.hpp"
#include "torusphase/operators.hpp"

namespace torusphase {

enum class Label { real, imaginary, complex_both };

const char* label_name(Label label);

/// Per-eigenvalue real/imaginary/complex partition at a relative tolerance.
struct Classification {
    std::vector<Label> labels;
    double broken_fraction = 0.0;  // fraction of non-real eigenvalues
    double tol = 0.0;
    double scale = 0.0;            // max |E| of the classified spectrum
};

Classification classify(const Eigen::VectorXcd& eigenvalues, double tol = 1e-7);

/// One point of a continued eigenvalue branch.
struct BranchPoint {
    double param = 0.0;
    std::complex<double> value;
    Label label = Label::real;
    int index = -1;      // position in the (Re, Im)-sorted spectrum
    bool ambiguous = false;
};
using Branch = std::vector<BranchPoint>;

/// Continues one eigenvalue through a sweep by maximal eigenvector overlap.
/// The branch starts at the smallest-|E| eigenvalue with non-negative
/// imaginary part (tie-break: non-negative real part); each later point
/// takes the eigenvalue whose eigenvector overlaps the previous one most.
/// A continuation whose top two overlaps differ by less than ambiguity_tol
/// (near-degeneracy at an exceptional point) is flagged, and the larger
/// overlap wins.
class BranchTracker {
  public:
    explicit BranchTracker(double classify_tol = 1e-7, double ambiguity_tol = 1e-6);

    /// Spectra must carry eigenvectors and come from identical grids, in
    /// sweep order.
    BranchPoint step(double param, const ComplexSpectrum& spectrum);

    const Branch& branch() const { return branch_; }
    int ambiguous_count() const { return ambiguous_count_; }

  private:
    double classify_tol_;
    double ambiguity_tol_;
    Branch branch_;
    Eigen::VectorXcd prev_vector_;
    int ambiguous_count_ = 0;
};

Branch track_branch(const std::vector<double>& params,
                    const std::vector<ComplexSpectrum>& spectra, double classify_tol = 1e-7,
                    double ambiguity_tol = 1e-6);

/// The per-point smallest-|E| eigenvalue with the canonical representative
/// (non-negative imaginary part, tie-break non-negative real part).
BranchPoint min_modulus_point(double param, const Eigen::VectorXcd& eigenvalues,
                              double classify_tol = 1e-7);

/// Smallest param at which the imaginary part of the branch changes sign
/// between consecutive imaginary-labeled points (gain/loss handoff);
/// returns the midpoint of the two bracketing params, or nothing.
std::optional<double> behavior_change_point(const Branch& branch);

enum class EpMethod { bisection, hermitian_oracle };

const char* ep_method_name(EpMethod method);

struct ExceptionalPoint {
    double param_value = 0.0;
    int branch_index = 0;
    EpMethod method = EpMethod::hermitian_oracle;
    int multiplicity = 1;
};

struct Window {
    double lo = 0.0;
    double hi = 0.0;
};

/// Eigenvalues nu_n of dminus*dplus (gamma-independent, W-positive
/// semidefinite), computed via symmetrize + eig_symmetric.  Throws when a
/// value is negative beyond -1e-10 * scale; smaller negatives clip to zero.
Eigen::VectorXd oracle_nu(const TorusGeometry& geom, double m, Bc bc, const Grid& grid);

/// Exceptional points from the Hermitian oracle: gamma*_n = sqrt(nu_n)
/// inside the window, ascending, one entry per eigenvalue with the
/// multiplicity of its numerically coincident group recorded.
std::vector<ExceptionalPoint> eps_from_oracle(const TorusGeometry& geom, double m, Bc bc,
                                              const Grid& grid, const Window& gamma_window);

struct BisectionOptions {
    double tol = 1e-6;
    int scan_points = 400;
    int refine_rounds = 2;  // extra doubled-density passes when roots keep appearing
};

/// Locates sign changes of the sweep diagnostic f(param) = signed nearest
/// E^2 to zero, bisecting each bracket to |delta| <= tol.  Brackets whose
/// converged |f| exceeds the local slope bound come from jump
/// discontinuities of the nearest-level selector and are discarded.
std::vector<ExceptionalPoint> eps_by_bisection(const std::function<double(double)>& diagnostic,
                                               const Window& window,
                                               const BisectionOptions& options = {},
                                               std::vector<std::string>* warnings = nullptr);

/// Cheap diagnostic param -> min|E^2|-signed for gamma sweeps: shift-invert
/// inverse iteration on dminus*dplus - gamma^2 I (assembled once).
std::function<double(double)> make_min_e2_diagnostic(const TorusGeometry& geom, double m, Bc bc,
                                                     const Grid& grid);

/// Same diagnostic for r sweeps at fixed gamma (operator rebuilt per probe).
std::function<double(double)> make_min_e2_diagnostic_r(double R, double m, Bc bc, double gamma,
                                                       const Grid& grid);

/// Reference diagnostic through the full first-order solve; used to
/// cross-check the cheap probe.
double min_e2_signed_from_spectrum(const Eigen::VectorXcd& eigenvalues);

/// Onset of numerically degenerate exceptional-point pairs: the smallest
/// oracle EP in the window whose multiplicity is >= 2.  Emitted alongside
/// the branch sign-flip diagnostic for the proportion study.
std::optional<double> degenerate_ep_onset(const std::vector<ExceptionalPoint>& oracle_eps,
                                          const Window& window);

}  // namespace torusphase
