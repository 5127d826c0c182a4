#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "torusphase/sweeps.hpp"

namespace torusphase {

inline constexpr const char* kVersion = "0.1.0";

/// Raised for invalid configuration; the CLI maps it to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when a solve fails; the CLI maps it to exit code 1.
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string command;          // spectrum | sweep-gamma | sweep-r | eps | proportion-study | converge
    double R = 10.0;
    double r = 8.0;
    double m = 0.5;
    std::string gamma = "0";      // single value or min:max:steps
    std::string r_range;          // min:max:steps (sweep-r)
    int N = 512;
    std::string bc = "periodic";  // periodic | antiperiodic
    double classify_tol = 1e-7;
    double ep_tol = 1e-6;
    int scan_points = 0;          // 0 = auto
    std::string sizes;            // proportion-study, e.g. 10:8,15:12,20:16
    std::string n_list = "128,256,512";
    std::string out;              // empty = $TORUSPHASE_OUTDIR or "."
    bool eigenvectors = true;
    int threads = 0;

    bool operator==(const RunConfig&) const = default;
};

struct RangeSpec {
    double lo = 0.0;
    double hi = 0.0;
    int steps = 1;
    bool is_range = false;
};

/// Parses "x" or "min:max:steps" (inclusive endpoints, steps = point count).
RangeSpec parse_range(const std::string& text, const std::string& field);

/// Parses CLI arguments (and an optional key=value config file given with
/// --config; explicit flags win) into a validated RunConfig.  Throws
/// ConfigError with a message naming the offending field.
RunConfig parse_config(const std::vector<std::string>& args);

/// Full invariant check; parse_config calls this.
void validate_config(const RunConfig& config);

Bc parse_bc(const std::string& text);

struct RunSummary {
    std::string command;
    std::size_t points = 0;
    std::size_t ep_count = 0;
    double broken_lo = 0.0;
    double broken_hi = 0.0;
    double wall_seconds = 0.0;
    std::vector<std::string> files;
    std::string one_line() const;
};

/// Executes the configured run and writes its outputs atomically
/// (temp file + rename) under the output directory.  On solver failure the
/// partial outputs are removed and SolverError is thrown naming the point.
RunSummary run(const RunConfig& config);

// File writers (also used by tests).  All numbers use 17 significant digits.
std::string spectrum_csv(const PhaseDiagram& diagram);
std::string branch_csv(const Branch& branch);
std::string eps_json(const std::vector<ExceptionalPoint>& eps);
std::string manifest_text(const RunConfig& config, double wall_seconds);
std::string proportion_csv(const ProportionStudy& study);
std::string convergence_csv(const ConvergenceReport& report);

}  // namespace torusphase
