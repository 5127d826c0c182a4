#include "torusphase/analysis.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace torusphase {

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();
}

const char* label_name(Label label) {
    switch (label) {
        case Label::real: return "real";
        case Label::imaginary: return "imaginary";
        default: return "complex";
    }
}

const char* ep_method_name(EpMethod method) {
    return method == EpMethod::bisection ? "bisection" : "hermitian-oracle";
}

Classification classify(const Eigen::VectorXcd& eigenvalues, double tol) {
    if (!(tol > 0.0) || tol > 1e-2)
        throw std::invalid_argument("classify: tol must lie in (0, 1e-2]");
    Classification out;
    out.tol = tol;
    const int n = static_cast<int>(eigenvalues.size());
    out.labels.reserve(n);
    out.scale = 0.0;
    for (int i = 0; i < n; ++i) out.scale = std::max(out.scale, std::abs(eigenvalues[i]));
    const double cut = tol * out.scale;
    int broken = 0;
    for (int i = 0; i < n; ++i) {
        const double re = std::abs(eigenvalues[i].real());
        const double im = std::abs(eigenvalues[i].imag());
        Label label;
        if (im <= cut) {
            label = Label::real;
        } else if (re <= cut) {
            label = Label::imaginary;
        } else {
            label = Label::complex_both;
        }
        if (label != Label::real) ++broken;
        out.labels.push_back(label);
    }
    out.broken_fraction = n > 0 ? static_cast<double>(broken) / n : 0.0;
    return out;
}

namespace {

Label classify_one(std::complex<double> value, double tol, double scale) {
    const double cut = tol * scale;
    if (std::abs(value.imag()) <= cut) return Label::real;
    if (std::abs(value.real()) <= cut) return Label::imaginary;
    return Label::complex_both;
}

// Canonical pick inside a minimum-|E| cluster: prefer non-negative
// imaginary part, then non-negative real part, then the larger values.
int canonical_pick(const Eigen::VectorXcd& values, const std::vector<int>& candidates,
                   double scale) {
    const double floor = 1e-12 * scale;
    int best = candidates.front();
    auto key = [&](int i) {
        return std::make_tuple(values[i].imag() >= -floor, values[i].real() >= -floor,
                               values[i].imag(), values[i].real());
    };
    for (int c : candidates)
        if (key(c) > key(best)) best = c;
    return best;
}

}  // namespace

BranchPoint min_modulus_point(double param, const Eigen::VectorXcd& eigenvalues,
                              double classify_tol) {
    if (eigenvalues.size() == 0)
        throw std::invalid_argument("min_modulus_point: empty spectrum");
    double scale = 0.0, best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < eigenvalues.size(); ++i) {
        scale = std::max(scale, std::abs(eigenvalues[i]));
        best = std::min(best, std::abs(eigenvalues[i]));
    }
    std::vector<int> cluster;
    const double slack = best * 1e-9 + 1e-300;
    for (int i = 0; i < eigenvalues.size(); ++i)
        if (std::abs(eigenvalues[i]) <= best + slack) cluster.push_back(i);
    const int pick = canonical_pick(eigenvalues, cluster, scale);
    BranchPoint point;
    point.param = param;
    point.value = eigenvalues[pick];
    point.index = pick;
    point.label = classify_one(point.value, classify_tol, scale);
    return point;
}

BranchTracker::BranchTracker(double classify_tol, double ambiguity_tol)
    : classify_tol_(classify_tol), ambiguity_tol_(ambiguity_tol) {}

BranchPoint BranchTracker::step(double param, const ComplexSpectrum& spectrum) {
    if (!spectrum.eigenvectors)
        throw std::invalid_argument("BranchTracker: spectra must carry eigenvectors");
    const Eigen::VectorXcd& vals = spectrum.eigenvalues;
    const Eigen::MatrixXcd& vecs = *spectrum.eigenvectors;

    BranchPoint point;
    point.param = param;
    double scale = 0.0;
    for (int i = 0; i < vals.size(); ++i) scale = std::max(scale, std::abs(vals[i]));

    if (branch_.empty()) {
        point = min_modulus_point(param, vals, classify_tol_);
        point.param = param;
    } else {
        // Maximal |<x_prev, x_next>| continuation.
        int best = 0, second = -1;
        double best_ov = -1.0, second_ov = -1.0;
        for (int i = 0; i < vecs.cols(); ++i) {
            const double norm = vecs.col(i).norm();
            const double ov =
                norm > 0.0 ? std::abs(prev_vector_.dot(vecs.col(i))) / norm : 0.0;
            if (ov > best_ov) {
                second = best;
                second_ov = best_ov;
                best = i;
                best_ov = ov;
            } else if (ov > second_ov) {
                second = i;
                second_ov = ov;
            }
        }
        point.index = best;
        point.value = vals[best];
        point.label = classify_one(point.value, classify_tol_, scale);
        if (second >= 0 && best_ov - second_ov < ambiguity_tol_) {
            point.ambiguous = true;
            ++ambiguous_count_;
        }
    }
    prev_vector_ = vecs.col(point.index).normalized();
    branch_.push_back(point);
    return point;
}

Branch track_branch(const std::vector<double>& params, const std::vector<ComplexSpectrum>& spectra,
                    double classify_tol, double ambiguity_tol) {
    if (params.size() != spectra.size())
        throw std::invalid_argument("track_branch: params/spectra size mismatch");
    BranchTracker tracker(classify_tol, ambiguity_tol);
    for (std::size_t i = 0; i < params.size(); ++i) tracker.step(params[i], spectra[i]);
    return tracker.branch();
}

std::optional<double> behavior_change_point(const Branch& branch) {
    const BranchPoint* prev = nullptr;
    for (const BranchPoint& point : branch) {
        if (point.label != Label::imaginary) continue;
        if (prev != nullptr && prev->value.imag() * point.value.imag() < 0.0)
            return 0.5 * (prev->param + point.param);
        prev = &point;
    }
    return std::nullopt;
}

Eigen::VectorXd oracle_nu(const TorusGeometry& geom, double m, Bc bc, const Grid& grid) {
    const SpinorMode mode(m, 0.0, bc);
    const OperatorPair pair = build_operator_pair(geom, mode, grid);
    const Eigen::MatrixXd product = pair.dminus * pair.dplus;
    Eigen::VectorXd nu = eig_symmetric(symmetrize(product, pair.node_weight));
    const double scale = std::max(std::abs(nu[0]), std::abs(nu[nu.size() - 1]));
    if (nu[0] < -1e-10 * scale)
        throw std::runtime_error("oracle_nu: negative eigenvalue beyond tolerance (assembly bug)");
    for (int i = 0; i < nu.size(); ++i)
        if (nu[i] < 0.0) nu[i] = 0.0;
    return nu;
}

std::vector<ExceptionalPoint> eps_from_oracle(const TorusGeometry& geom, double m, Bc bc,
                                              const Grid& grid, const Window& gamma_window) {
    if (gamma_window.lo < 0.0 || gamma_window.hi < gamma_window.lo)
        throw std::invalid_argument("eps_from_oracle: window must satisfy 0 <= lo <= hi");
    const Eigen::VectorXd nu = oracle_nu(geom, m, bc, grid);
    Eigen::VectorXd gamma_star(nu.size());
    for (int i = 0; i < nu.size(); ++i) gamma_star[i] = std::sqrt(nu[i]);

    // Multiplicity groups: numerically coincident thresholds at double
    // precision resolution.
    const double group_tol = 64.0 * kEps * gamma_star[gamma_star.size() - 1];
    std::vector<int> multiplicity(nu.size(), 1);
    int start = 0;
    for (int i = 1; i <= nu.size(); ++i) {
        if (i == nu.size() || gamma_star[i] - gamma_star[i - 1] > group_tol) {
            for (int j = start; j < i; ++j) multiplicity[j] = i - start;
            start = i;
        }
    }

    std::vector<ExceptionalPoint> out;
    for (int i = 0; i < nu.size(); ++i) {
        if (gamma_star[i] < gamma_window.lo || gamma_star[i] > gamma_window.hi) continue;
        out.push_back({gamma_star[i], i, EpMethod::hermitian_oracle, multiplicity[i]});
    }
    return out;
}

namespace {

struct ScanRoot {
    double param;
    double value;  // |f| at the converged point
};

// Bisects a sign-change bracket of f to width <= tol/4.
ScanRoot bisect_bracket(const std::function<double(double)>& f, double lo, double hi, double flo,
                        double tol) {
    while (hi - lo > 0.25 * tol) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return {mid, 0.0};
        if ((flo < 0.0) == (fm < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    const double root = 0.5 * (lo + hi);
    return {root, std::abs(f(root))};
}

std::vector<ScanRoot> scan_and_bisect(const std::function<double(double)>& f, const Window& window,
                                      double tol, int scan_points) {
    std::vector<ScanRoot> roots;
    const double width = window.hi - window.lo;
    double prev_x = window.lo;
    double prev_f = f(prev_x);
    for (int i = 1; i < scan_points; ++i) {
        const double x = window.lo + width * i / (scan_points - 1);
        const double fx = f(x);
        if (prev_f == 0.0) {
            roots.push_back({prev_x, 0.0});
        } else if (fx != 0.0 && (prev_f < 0.0) != (fx < 0.0)) {
            roots.push_back(bisect_bracket(f, prev_x, x, prev_f, tol));
        }
        prev_x = x;
        prev_f = fx;
    }
    if (prev_f == 0.0) roots.push_back({prev_x, 0.0});
    return roots;
}

}  // namespace

std::vector<ExceptionalPoint> eps_by_bisection(const std::function<double(double)>& diagnostic,
                                               const Window& window,
                                               const BisectionOptions& options,
                                               std::vector<std::string>* warnings) {
    if (!(window.hi > window.lo) || !std::isfinite(window.lo) || !std::isfinite(window.hi))
        throw std::invalid_argument("eps_by_bisection: window must be finite with lo < hi");
    if (options.tol < 1e-8)
        throw std::invalid_argument("eps_by_bisection: tol must be >= 1e-8");

    int scan = std::max(options.scan_points, 3);
    std::vector<ScanRoot> roots = scan_and_bisect(diagnostic, window, options.tol, scan);
    for (int round = 0; round < options.refine_rounds; ++round) {
        scan = 2 * scan - 1;  // refined grid contains the previous nodes
        std::vector<ScanRoot> refined = scan_and_bisect(diagnostic, window, options.tol, scan);
        const bool grew = refined.size() > roots.size();
        roots = std::move(refined);
        if (!grew) break;
        if (round == options.refine_rounds - 1 && warnings != nullptr)
            warnings->push_back(
                "eps_by_bisection: scan refinement cap reached while still discovering roots; "
                "results may miss closely spaced exceptional points");
    }

    // Keep genuine zero crossings: at a root |f| ~ |f'| * tol/4 with
    // |f'| = 2*param; a jump of the nearest-level selector converges with
    // |f| stuck at half the local level gap.
    std::vector<ExceptionalPoint> out;
    for (const ScanRoot& root : roots) {
        const double slope_bound = std::max(2.0 * std::abs(root.param), options.tol);
        if (root.value <= slope_bound * options.tol) {
            out.push_back(
                {root.param, static_cast<int>(out.size()), EpMethod::bisection, 1});
        }
    }
    std::sort(out.begin(), out.end(),
              [](const ExceptionalPoint& a, const ExceptionalPoint& b) {
                  return a.param_value < b.param_value;
              });
    for (std::size_t i = 0; i < out.size(); ++i) out[i].branch_index = static_cast<int>(i);
    return out;
}

namespace {

// Signed eigenvalue of M nearest zero by shift-invert inverse iteration,
// with the Rayleigh quotient taken in the weighted inner product.
double nearest_eigenvalue_to_zero(const Eigen::MatrixXd& M, const Eigen::VectorXd& w,
                                  const Eigen::VectorXd& seed) {
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
    Eigen::VectorXd x = seed;
    double rho_prev = std::numeric_limits<double>::infinity();
    const double scale = M.cwiseAbs().maxCoeff();
    for (int iter = 0; iter < 60; ++iter) {
        Eigen::VectorXd y = lu.solve(x);
        if (!y.allFinite()) return 0.0;  // landed on an exact eigenvalue
        const double norm = y.norm();
        if (norm == 0.0) return 0.0;
        x = y / norm;
        const double rho = x.dot(w.cwiseProduct(M * x)) / x.dot(w.cwiseProduct(x));
        if (std::abs(rho - rho_prev) <= 1e-14 * scale) return rho;
        rho_prev = rho;
    }
    return rho_prev;
}

Eigen::VectorXd deterministic_seed(int n) {
    Eigen::VectorXd seed(n);
    // Fixed quasi-random entries; avoids accidental orthogonality to the
    // target eigenvector and keeps probes bit-reproducible.
    double state = 0.5;
    for (int i = 0; i < n; ++i) {
        state = std::fmod(state * 997.0 + 0.1234567, 1.0);
        seed[i] = state - 0.5;
    }
    return seed.normalized();
}

}  // namespace

std::function<double(double)> make_min_e2_diagnostic(const TorusGeometry& geom, double m, Bc bc,
                                                     const Grid& grid) {
    const SpinorMode mode(m, 0.0, bc);
    const OperatorPair pair = build_operator_pair(geom, mode, grid);
    const Eigen::MatrixXd product = pair.dminus * pair.dplus;
    const Eigen::VectorXd w = pair.node_weight;
    const Eigen::VectorXd seed = deterministic_seed(grid.size());
    return [product, w, seed](double gamma) {
        Eigen::MatrixXd M = product;
        M.diagonal().array() -= gamma * gamma;
        return nearest_eigenvalue_to_zero(M, w, seed);
    };
}

std::function<double(double)> make_min_e2_diagnostic_r(double R, double m, Bc bc, double gamma,
                                                       const Grid& grid_in) {
    const Eigen::VectorXd seed = deterministic_seed(grid_in.size());
    return [R, m, bc, gamma, grid = grid_in, seed](double r) {
        const TorusGeometry geom(R, r);
        const SpinorMode mode(m, 0.0, bc);
        const OperatorPair pair = build_operator_pair(geom, mode, grid);
        Eigen::MatrixXd M = pair.dminus * pair.dplus;
        M.diagonal().array() -= gamma * gamma;
        return nearest_eigenvalue_to_zero(M, pair.node_weight, seed);
    };
}

double min_e2_signed_from_spectrum(const Eigen::VectorXcd& eigenvalues) {
    if (eigenvalues.size() == 0)
        throw std::invalid_argument("min_e2_signed_from_spectrum: empty spectrum");
    int best = 0;
    for (int i = 1; i < eigenvalues.size(); ++i)
        if (std::abs(eigenvalues[i]) < std::abs(eigenvalues[best])) best = i;
    const std::complex<double> e2 = eigenvalues[best] * eigenvalues[best];
    return e2.real();
}

std::optional<double> degenerate_ep_onset(const std::vector<ExceptionalPoint>& oracle_eps,
                                          const Window& window) {
    for (const ExceptionalPoint& ep : oracle_eps) {
        if (ep.method != EpMethod::hermitian_oracle) continue;
        if (ep.param_value < window.lo || ep.param_value > window.hi) continue;
        if (ep.multiplicity >= 2) return ep.param_value;
    }
    return std::nullopt;
}

}  // namespace torusphase
