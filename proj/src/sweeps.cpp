#include "torusphase/sweeps.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <stdexcept>
#include <thread>

namespace torusphase {

namespace {

int resolve_threads(int requested, std::size_t points) {
    int n = requested;
    if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
    return static_cast<int>(std::min<std::size_t>(n, std::max<std::size_t>(points, 1)));
}

void check_grid_increasing(const std::vector<double>& grid, const char* what) {
    if (grid.size() < 1) throw std::invalid_argument(std::string(what) + ": empty grid");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw std::invalid_argument(std::string(what) + ": grid must be strictly increasing");
}

struct PointSolve {
    SweepPoint point;
    std::optional<Eigen::MatrixXcd> eigenvectors;
};

PointSolve solve_point(const Eigen::MatrixXcd& H, double param, const SweepOptions& options) {
    PointSolve out;
    out.point.param = param;
    const ComplexSpectrum spectrum = eig_general(H, options.compute_eigenvectors);
    if (!spectrum.converged) {
        out.point.failed = true;
        return out;
    }
    out.point.eigenvalues = spectrum.eigenvalues;
    out.point.residuals = spectrum.residuals;
    const Classification cls = classify(spectrum.eigenvalues, options.classify_tol);
    out.point.labels = cls.labels;
    out.point.broken_fraction = cls.broken_fraction;
    out.eigenvectors = spectrum.eigenvectors;
    return out;
}

// Runs the per-point solves in index-ordered batches (deterministic merge)
// and feeds the branch trackers sequentially.
void run_sweep_points(PhaseDiagram& diagram,
                      const std::function<Eigen::MatrixXcd(double)>& assemble,
                      const SweepOptions& options) {
    const std::vector<double>& grid = diagram.points;
    const int threads = resolve_threads(options.threads, grid.size());
    BranchTracker tracker(options.classify_tol, options.ambiguity_tol);

    diagram.spectra.resize(grid.size());
    for (std::size_t base = 0; base < grid.size(); base += threads) {
        const std::size_t count = std::min<std::size_t>(threads, grid.size() - base);
        std::vector<std::future<PointSolve>> batch;
        batch.reserve(count);
        for (std::size_t j = 0; j < count; ++j) {
            const double param = grid[base + j];
            batch.push_back(std::async(std::launch::async, [&assemble, param, &options] {
                return solve_point(assemble(param), param, options);
            }));
        }
        for (std::size_t j = 0; j < count; ++j) {
            PointSolve solved = batch[j].get();
            const std::size_t idx = base + j;
            if (!solved.point.failed) {
                diagram.branch_min.push_back(min_modulus_point(
                    solved.point.param, solved.point.eigenvalues, options.classify_tol));
                if (options.compute_eigenvectors && solved.eigenvectors) {
                    ComplexSpectrum view;
                    view.eigenvalues = solved.point.eigenvalues;
                    view.eigenvectors = std::move(solved.eigenvectors);
                    tracker.step(solved.point.param, view);
                }
            }
            diagram.spectra[idx] = std::move(solved.point);
        }
    }
    diagram.branch = tracker.branch();
    diagram.ambiguous_continuations = tracker.ambiguous_count();
    diagram.behavior_change = behavior_change_point(diagram.branch);
    diagram.behavior_change_min = behavior_change_point(diagram.branch_min);
}

}  // namespace

std::vector<double> linspace(double lo, double hi, int count) {
    if (count < 1) throw std::invalid_argument("linspace: count must be >= 1");
    std::vector<double> out(count);
    if (count == 1) {
        out[0] = lo;
        return out;
    }
    for (int i = 0; i < count; ++i) out[i] = lo + (hi - lo) * i / (count - 1);
    return out;
}

PhaseDiagram sweep_gamma(const TorusGeometry& geom, double m, Bc bc,
                         const std::vector<double>& gamma_grid, int N,
                         const SweepOptions& options) {
    check_grid_increasing(gamma_grid, "sweep_gamma");
    if (gamma_grid.front() < 0.0) throw std::invalid_argument("sweep_gamma: gamma must be >= 0");

    const Grid grid(N);
    PhaseDiagram diagram;
    diagram.config = {"gamma", geom.R, geom.r, 0.0, m, N, bc, options.classify_tol,
                      options.bisection.tol};
    diagram.points = gamma_grid;

    // Gamma enters only on the diagonal: assemble once, shift per point.
    const Eigen::MatrixXcd H0 = build_first_order(geom, SpinorMode(m, 0.0, bc), grid);
    const auto assemble = [&H0, N](double gamma) {
        Eigen::MatrixXcd H = H0;
        const std::complex<double> ig(0.0, gamma);
        H.diagonal().head(N).array() -= ig;
        H.diagonal().tail(N).array() += ig;
        return H;
    };
    run_sweep_points(diagram, assemble, options);

    if (options.detect_eps) {
        const Window window{gamma_grid.front(), gamma_grid.back()};
        auto oracle = eps_from_oracle(geom, m, bc, grid, window);
        diagram.degenerate_onset = degenerate_ep_onset(oracle, window);
        BisectionOptions bis = options.bisection;
        bis.scan_points = std::max<int>(bis.scan_points, 2 * static_cast<int>(gamma_grid.size()));
        auto bisected = window.hi > window.lo
                            ? eps_by_bisection(make_min_e2_diagnostic(geom, m, bc, grid), window,
                                               bis, &diagram.warnings)
                            : std::vector<ExceptionalPoint>{};
        diagram.eps = std::move(oracle);
        diagram.eps.insert(diagram.eps.end(), bisected.begin(), bisected.end());
    }
    return diagram;
}

PhaseDiagram sweep_r(double R, double m, Bc bc, double gamma, const std::vector<double>& r_grid,
                     int N, const SweepOptions& options) {
    check_grid_increasing(r_grid, "sweep_r");
    for (double r : r_grid)
        if (!(r > 0.0) || !(r < R))
            throw std::invalid_argument("sweep_r: every r must satisfy 0 < r < R");

    const Grid grid(N);
    PhaseDiagram diagram;
    diagram.config = {"r", R, 0.0, gamma, m, N, bc, options.classify_tol, options.bisection.tol};
    diagram.points = r_grid;

    const auto assemble = [R, m, bc, gamma, &grid](double r) {
        return build_first_order(TorusGeometry(R, r), SpinorMode(m, gamma, bc), grid);
    };
    run_sweep_points(diagram, assemble, options);

    if (options.detect_eps && r_grid.size() >= 2) {
        const Window window{r_grid.front(), r_grid.back()};
        BisectionOptions bis = options.bisection;
        bis.scan_points = std::max<int>(bis.scan_points, 2 * static_cast<int>(r_grid.size()));
        diagram.eps = eps_by_bisection(make_min_e2_diagnostic_r(R, m, bc, gamma, grid), window,
                                       bis, &diagram.warnings);
    }
    return diagram;
}

ProportionStudy optimal_proportion_study(double ratio,
                                         const std::vector<std::pair<double, double>>& sizes,
                                         double m, Bc bc, const std::vector<double>& gamma_grid,
                                         int N, const SweepOptions& options) {
    if (sizes.empty()) throw std::invalid_argument("optimal_proportion_study: no sizes");
    ProportionStudy study;
    study.ratio = ratio;
    for (const auto& [R, r] : sizes) {
        if (std::abs(R / r - ratio) > 1e-12 * std::abs(ratio))
            throw std::invalid_argument("optimal_proportion_study: size does not match ratio");
        const TorusGeometry geom(R, r);
        const PhaseDiagram diagram = sweep_gamma(geom, m, bc, gamma_grid, N, options);
        ProportionRow row;
        row.R = R;
        row.r = r;
        row.change_point = diagram.behavior_change;
        row.change_point_min = diagram.behavior_change_min;
        row.degenerate_onset = diagram.degenerate_onset;
        study.rows.push_back(row);
    }
    return study;
}

ConvergenceReport convergence_study(const TorusGeometry& geom, const SpinorMode& mode,
                                    const std::vector<int>& n_values, int levels, SpinSign s) {
    if (n_values.size() < 3)
        throw std::invalid_argument("convergence_study: need at least 3 grid sizes");
    for (std::size_t i = 1; i < n_values.size(); ++i)
        if (n_values[i] != 2 * n_values[i - 1])
            throw std::invalid_argument("convergence_study: each N must double the previous");

    ConvergenceReport report;
    report.n_values = n_values;
    report.eigenvalues.resize(n_values.size(), levels);
    double scale = 0.0;
    for (std::size_t i = 0; i < n_values.size(); ++i) {
        const Grid grid(n_values[i]);
        const SquaredOperator op = build_squared(geom, mode, grid, s);
        const Eigen::VectorXd vals = eig_symmetric(symmetrize(op.matrix, op.weight));
        for (int j = 0; j < levels; ++j) report.eigenvalues(i, j) = vals[j];
        scale = std::max(scale, std::abs(vals[levels - 1]));
    }

    const std::size_t last = n_values.size() - 1;
    for (int j = 0; j < levels; ++j) {
        const double coarse = std::abs(report.eigenvalues(last - 2, j) - report.eigenvalues(last - 1, j));
        const double fine = std::abs(report.eigenvalues(last - 1, j) - report.eigenvalues(last, j));
        const bool ok = fine > 1e-12 * scale;
        report.reliable.push_back(ok);
        if (!ok) {
            report.orders.push_back(0.0);
            report.warnings.push_back("convergence_study: level " + std::to_string(j) +
                                      " differences at rounding floor; order estimate unreliable");
            continue;
        }
        report.orders.push_back(std::log2(coarse / fine));
    }
    return report;
}

}  // namespace torusphase
