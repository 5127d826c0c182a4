#pragma once

#include <optional>
#include <string>
#include <vector>

#include "torusphase/analysis.hpp"

namespace torusphase {

struct SweepOptions {
    int threads = 0;                   // 0 = hardware concurrency
    double classify_tol = 1e-7;
    double ambiguity_tol = 1e-6;
    bool compute_eigenvectors = true;  // residuals + overlap-tracked branch
    bool detect_eps = true;
    BisectionOptions bisection;
};

/// One solved sweep point: full spectrum with classification.
struct SweepPoint {
    double param = 0.0;
    Eigen::VectorXcd eigenvalues;
    Eigen::VectorXd residuals;
    std::vector<Label> labels;
    double broken_fraction = 0.0;
    bool failed = false;
};

struct SweepConfig {
    std::string swept;  // "gamma" or "r"
    double R = 0.0;
    double r = 0.0;      // fixed minor radius (gamma sweeps)
    double gamma = 0.0;  // fixed gain/loss (r sweeps)
    double m = 0.5;
    int N = 0;
    Bc bc = Bc::periodic;
    double classify_tol = 1e-7;
    double ep_tol = 1e-6;
};

struct PhaseDiagram {
    SweepConfig config;
    std::vector<double> points;
    std::vector<SweepPoint> spectra;
    Branch branch;      // overlap-continued (needs eigenvectors)
    Branch branch_min;  // per-point smallest |E|
    std::vector<ExceptionalPoint> eps;
    std::optional<double> behavior_change;      // sign flip on the tracked branch
    std::optional<double> behavior_change_min;  // sign flip on the min-|E| branch
    std::optional<double> degenerate_onset;     // first multiplicity>=2 oracle EP (gamma sweeps)
    int ambiguous_continuations = 0;
    std::vector<std::string> warnings;
};

/// Solves the first-order operator at every gamma (assembly once, diagonal
/// shift per point), classifies, tracks branches and detects exceptional
/// points by both methods.  Points run concurrently; results merge in
/// parameter order.
PhaseDiagram sweep_gamma(const TorusGeometry& geom, double m, Bc bc,
                         const std::vector<double>& gamma_grid, int N,
                         const SweepOptions& options = {});

/// Fixed-gamma sweep over the minor radius.  Every r must satisfy r < R.
PhaseDiagram sweep_r(double R, double m, Bc bc, double gamma, const std::vector<double>& r_grid,
                     int N, const SweepOptions& options = {});

struct ProportionRow {
    double R = 0.0;
    double r = 0.0;
    std::optional<double> change_point;      // sign-flip diagnostic, tracked branch
    std::optional<double> change_point_min;  // sign-flip diagnostic, min-|E| branch
    std::optional<double> degenerate_onset;  // multiplicity>=2 EP onset
};

struct ProportionStudy {
    double ratio = 0.0;
    std::vector<ProportionRow> rows;
};

/// Runs sweep_gamma for each (R, r) at fixed ratio R/r and extracts the
/// behavior-change diagnostics per size.
ProportionStudy optimal_proportion_study(double ratio, const std::vector<std::pair<double, double>>& sizes,
                                         double m, Bc bc, const std::vector<double>& gamma_grid,
                                         int N, const SweepOptions& options = {});

struct ConvergenceReport {
    std::vector<int> n_values;
    Eigen::MatrixXd eigenvalues;        // one row per N, one column per tracked level
    std::vector<double> orders;         // Richardson order estimate per level
    std::vector<bool> reliable;         // false when differences sit at rounding floor
    std::vector<std::string> warnings;
};

/// Richardson convergence-order estimate for the lowest `levels` eigenvalues
/// of the squared operator.  Requires >= 3 grid sizes, each double the last.
ConvergenceReport convergence_study(const TorusGeometry& geom, const SpinorMode& mode,
                                    const std::vector<int>& n_values, int levels = 5,
                                    SpinSign s = SpinSign::plus);

/// Inclusive linearly spaced grid with `count` points.
std::vector<double> linspace(double lo, double hi, int count);

}  // namespace torusphase
