#include "torusphase/io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

namespace torusphase {

namespace fs = std::filesystem;

namespace {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string fmt_opt(const std::optional<double>& x) {
    return x ? fmt17(*x) : "nan";
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep)) parts.push_back(item);
    return parts;
}

double to_double(const std::string& text, const std::string& field) {
    try {
        std::size_t used = 0;
        const double value = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument("");
        return value;
    } catch (...) {
        throw ConfigError("invalid " + field + ": '" + text + "' is not a number");
    }
}

int to_int(const std::string& text, const std::string& field) {
    try {
        std::size_t used = 0;
        const int value = std::stoi(text, &used);
        if (used != text.size()) throw std::invalid_argument("");
        return value;
    } catch (...) {
        throw ConfigError("invalid " + field + ": '" + text + "' is not an integer");
    }
}

}  // namespace

RangeSpec parse_range(const std::string& text, const std::string& field) {
    const auto parts = split(text, ':');
    RangeSpec spec;
    if (parts.size() == 1) {
        spec.lo = spec.hi = to_double(parts[0], field);
        spec.steps = 1;
        return spec;
    }
    if (parts.size() != 3)
        throw ConfigError("invalid " + field + ": expected a value or min:max:steps, got '" +
                          text + "'");
    spec.lo = to_double(parts[0], field);
    spec.hi = to_double(parts[1], field);
    spec.steps = to_int(parts[2], field);
    spec.is_range = true;
    if (!(spec.hi > spec.lo))
        throw ConfigError("invalid " + field + ": range must have min < max");
    if (spec.steps < 2)
        throw ConfigError("invalid " + field + ": range needs at least 2 steps");
    return spec;
}

Bc parse_bc(const std::string& text) {
    if (text == "periodic") return Bc::periodic;
    if (text == "antiperiodic") return Bc::antiperiodic;
    throw ConfigError("invalid --bc: must be 'periodic' or 'antiperiodic', got '" + text + "'");
}

void validate_config(const RunConfig& config) {
    static const std::vector<std::string> commands = {"spectrum",  "sweep-gamma",      "sweep-r",
                                                      "eps",       "proportion-study", "converge"};
    if (std::find(commands.begin(), commands.end(), config.command) == commands.end())
        throw ConfigError("invalid --command: '" + config.command +
                          "' (expected spectrum, sweep-gamma, sweep-r, eps, proportion-study or "
                          "converge)");
    if (!std::isfinite(config.R) || !(config.R > 0.0))
        throw ConfigError("invalid --R: must be finite and > 0");
    if (!std::isfinite(config.r) || !(config.r > 0.0))
        throw ConfigError("invalid --r: must be finite and > 0");
    if (config.command != "sweep-r" && !(config.r < config.R))
        throw ConfigError("invalid --r: r must be < R");
    if (!is_half_odd_integer(config.m))
        throw ConfigError("invalid --m: m must be half-odd-integer (..., -1/2, 1/2, 3/2, ...)");
    if (config.N < 8 || config.N % 2 != 0)
        throw ConfigError("invalid --N: must be even and >= 8");
    parse_bc(config.bc);
    if (!(config.classify_tol > 0.0) || config.classify_tol > 1e-2)
        throw ConfigError("invalid --classify-tol: must lie in (0, 1e-2]");
    if (config.ep_tol < 1e-8)
        throw ConfigError("invalid --ep-tol: must be >= 1e-8");
    if (config.scan_points < 0) throw ConfigError("invalid --scan-points: must be >= 0");
    if (config.threads < 0) throw ConfigError("invalid --threads: must be >= 0");

    const RangeSpec gamma = parse_range(config.gamma, "--gamma");
    if (gamma.lo < 0.0) throw ConfigError("invalid --gamma: must be >= 0");
    if (config.command == "spectrum" && gamma.is_range)
        throw ConfigError("invalid --gamma: spectrum needs a single value, not a range");
    if ((config.command == "sweep-gamma" || config.command == "eps" ||
         config.command == "proportion-study") &&
        !gamma.is_range)
        throw ConfigError("invalid --gamma: " + config.command + " needs a min:max:steps range");

    if (config.command == "sweep-r") {
        if (config.r_range.empty())
            throw ConfigError("invalid --r-range: required for sweep-r");
        const RangeSpec rr = parse_range(config.r_range, "--r-range");
        if (!rr.is_range) throw ConfigError("invalid --r-range: needs a min:max:steps range");
        if (!(rr.lo > 0.0) || !(rr.hi < config.R))
            throw ConfigError("invalid --r-range: every r must satisfy 0 < r < R");
        if (!gamma.is_range && gamma.lo < 0.0)
            throw ConfigError("invalid --gamma: must be >= 0");
    }

    if (config.command == "proportion-study") {
        if (config.sizes.empty())
            throw ConfigError("invalid --sizes: required for proportion-study, e.g. 10:8,15:12");
        double ratio = 0.0;
        for (const std::string& part : split(config.sizes, ',')) {
            const auto rv = split(part, ':');
            if (rv.size() != 2)
                throw ConfigError("invalid --sizes: expected R:r pairs, got '" + part + "'");
            const double R = to_double(rv[0], "--sizes");
            const double r = to_double(rv[1], "--sizes");
            if (!(r > 0.0) || !(r < R))
                throw ConfigError("invalid --sizes: r must be < R in '" + part + "'");
            if (ratio == 0.0)
                ratio = R / r;
            else if (std::abs(R / r - ratio) > 1e-12 * ratio)
                throw ConfigError("invalid --sizes: all pairs must share the ratio R/r");
        }
    }

    if (config.command == "converge") {
        const auto parts = split(config.n_list, ',');
        if (parts.size() < 3)
            throw ConfigError("invalid --N-list: need at least 3 comma-separated sizes");
        int prev = 0;
        for (const std::string& part : parts) {
            const int n = to_int(part, "--N-list");
            if (n < 8 || n % 2 != 0)
                throw ConfigError("invalid --N-list: every N must be even and >= 8");
            if (prev != 0 && n != 2 * prev)
                throw ConfigError("invalid --N-list: each N must double the previous");
            prev = n;
        }
    }
}

RunConfig parse_config(const std::vector<std::string>& args) {
    RunConfig config;
    CLI::App app{"torusphase: PT-symmetric torus Dirac spectra"};
    app.set_config("--config", "", "flat key=value config file; explicit flags win");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.add_option("-c,--command", config.command,
                   "spectrum | sweep-gamma | sweep-r | eps | proportion-study | converge");
    app.add_option("--R", config.R, "major radius (axis to tube center)");
    app.add_option("--r", config.r, "minor (tube) radius");
    app.add_option("--m", config.m, "azimuthal half-odd-integer mode");
    app.add_option("--gamma", config.gamma, "gain/loss strength: value or min:max:steps");
    app.add_option("--r-range", config.r_range, "swept minor radius: min:max:steps");
    app.add_option("--N", config.N, "poloidal grid size (even, >= 8)");
    app.add_option("--bc", config.bc, "periodic | antiperiodic");
    app.add_option("--classify-tol", config.classify_tol, "relative classification tolerance");
    app.add_option("--ep-tol", config.ep_tol, "bisection tolerance for exceptional points");
    app.add_option("--scan-points", config.scan_points, "bisection scan density (0 = auto)");
    app.add_option("--sizes", config.sizes, "proportion-study torus sizes R:r,R:r,...");
    app.add_option("--N-list", config.n_list, "converge grid sizes, each double the previous");
    app.add_option("--out", config.out, "output directory (default $TORUSPHASE_OUTDIR or .)");
    app.add_flag("--eigenvectors,!--no-eigenvectors", config.eigenvectors,
                 "compute eigenvectors (residuals + tracked branch)");
    app.add_option("--threads", config.threads, "worker threads (0 = auto)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& err) {
        throw ConfigError(err.what());
    }
    validate_config(config);
    return config;
}

// ---- writers -----------------------------------------------------------

std::string spectrum_csv(const PhaseDiagram& diagram) {
    std::string out = "param,index,re_E,im_E,label,residual\n";
    for (std::size_t p = 0; p < diagram.points.size(); ++p) {
        const SweepPoint& point = diagram.spectra[p];
        for (int i = 0; i < point.eigenvalues.size(); ++i) {
            out += fmt17(point.param);
            out += ',';
            out += std::to_string(i);
            out += ',';
            out += fmt17(point.eigenvalues[i].real());
            out += ',';
            out += fmt17(point.eigenvalues[i].imag());
            out += ',';
            out += label_name(point.labels[i]);
            out += ',';
            out += fmt17(point.residuals.size() > i ? point.residuals[i] : -1.0);
            out += '\n';
        }
    }
    return out;
}

std::string branch_csv(const Branch& branch) {
    std::string out = "param,re_E,im_E\n";
    for (const BranchPoint& point : branch) {
        out += fmt17(point.param);
        out += ',';
        out += fmt17(point.value.real());
        out += ',';
        out += fmt17(point.value.imag());
        out += '\n';
    }
    return out;
}

std::string eps_json(const std::vector<ExceptionalPoint>& eps) {
    std::string out = "[\n";
    for (std::size_t i = 0; i < eps.size(); ++i) {
        out += "  {\"param_value\": " + fmt17(eps[i].param_value) +
               ", \"branch_index\": " + std::to_string(eps[i].branch_index) + ", \"method\": \"" +
               ep_method_name(eps[i].method) +
               "\", \"multiplicity\": " + std::to_string(eps[i].multiplicity) + "}";
        if (i + 1 < eps.size()) out += ',';
        out += '\n';
    }
    out += "]\n";
    return out;
}

std::string manifest_text(const RunConfig& config, double wall_seconds) {
    std::string out;
    out += "# torusphase manifest (version " + std::string(kVersion) + ")\n";
    out += "# wall_seconds " + fmt17(wall_seconds) + "\n";
    out += "command=" + config.command + "\n";
    out += "R=" + fmt17(config.R) + "\n";
    out += "r=" + fmt17(config.r) + "\n";
    out += "m=" + fmt17(config.m) + "\n";
    out += "gamma=" + config.gamma + "\n";
    if (!config.r_range.empty()) out += "r-range=" + config.r_range + "\n";
    out += "N=" + std::to_string(config.N) + "\n";
    out += "bc=" + config.bc + "\n";
    out += "classify-tol=" + fmt17(config.classify_tol) + "\n";
    out += "ep-tol=" + fmt17(config.ep_tol) + "\n";
    out += "scan-points=" + std::to_string(config.scan_points) + "\n";
    if (!config.sizes.empty()) out += "sizes=" + config.sizes + "\n";
    out += "N-list=" + config.n_list + "\n";
    if (!config.out.empty()) out += "out=" + config.out + "\n";
    out += std::string("eigenvectors=") + (config.eigenvectors ? "true" : "false") + "\n";
    out += "threads=" + std::to_string(config.threads) + "\n";
    return out;
}

std::string proportion_csv(const ProportionStudy& study) {
    std::string out = "R,r,change_point,change_point_min,degenerate_onset\n";
    for (const ProportionRow& row : study.rows) {
        out += fmt17(row.R) + "," + fmt17(row.r) + "," + fmt_opt(row.change_point) + "," +
               fmt_opt(row.change_point_min) + "," + fmt_opt(row.degenerate_onset) + "\n";
    }
    return out;
}

std::string convergence_csv(const ConvergenceReport& report) {
    std::string out = "N,level,eigenvalue,order,reliable\n";
    for (std::size_t i = 0; i < report.n_values.size(); ++i) {
        for (int j = 0; j < report.eigenvalues.cols(); ++j) {
            out += std::to_string(report.n_values[i]) + "," + std::to_string(j) + "," +
                   fmt17(report.eigenvalues(i, j)) + "," + fmt17(report.orders[j]) + "," +
                   (report.reliable[j] ? "1" : "0") + "\n";
        }
    }
    return out;
}

// ---- run ----------------------------------------------------------------

namespace {

std::string resolve_outdir(const RunConfig& config) {
    if (!config.out.empty()) return config.out;
    if (const char* env = std::getenv("TORUSPHASE_OUTDIR"); env != nullptr && *env != '\0')
        return env;
    return ".";
}

void atomic_write(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw SolverError("cannot open for writing: " + tmp.string());
        out << content;
        if (!out) throw SolverError("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

void check_failures(const PhaseDiagram& diagram) {
    for (std::size_t i = 0; i < diagram.spectra.size(); ++i)
        if (diagram.spectra[i].failed)
            throw SolverError("eigensolver failed to converge at " + diagram.config.swept + "=" +
                              fmt17(diagram.points[i]));
}

SweepOptions sweep_options(const RunConfig& config) {
    SweepOptions options;
    options.threads = config.threads;
    options.classify_tol = config.classify_tol;
    options.compute_eigenvectors = config.eigenvectors;
    options.bisection.tol = config.ep_tol;
    if (config.scan_points > 0) options.bisection.scan_points = config.scan_points;
    return options;
}

struct OutputStager {
    fs::path dir;
    std::vector<fs::path> written;

    void stage(const std::string& name, const std::string& content) {
        atomic_write(dir / name, content);
        written.push_back(dir / name);
    }
    void rollback() {
        for (const fs::path& path : written) {
            std::error_code ec;
            fs::remove(path, ec);
        }
    }
};

}  // namespace

RunSummary run(const RunConfig& config) {
    validate_config(config);
    const auto start = std::chrono::steady_clock::now();
    RunSummary summary;
    summary.command = config.command;

    OutputStager stager{resolve_outdir(config), {}};
    fs::create_directories(stager.dir);

    const Bc bc = parse_bc(config.bc);
    const RangeSpec gamma = parse_range(config.gamma, "--gamma");

    auto finish = [&](double broken_lo, double broken_hi) {
        summary.broken_lo = broken_lo;
        summary.broken_hi = broken_hi;
        const auto stop = std::chrono::steady_clock::now();
        summary.wall_seconds = std::chrono::duration<double>(stop - start).count();
        stager.stage("manifest.txt", manifest_text(config, summary.wall_seconds));
        for (const fs::path& path : stager.written) summary.files.push_back(path.string());
    };

    try {
        if (config.command == "spectrum") {
            const TorusGeometry geom(config.R, config.r);
            const Grid grid(config.N);
            const Eigen::MatrixXcd H =
                build_first_order(geom, SpinorMode(config.m, gamma.lo, bc), grid);
            const ComplexSpectrum spectrum = eig_general(H, config.eigenvectors);
            if (!spectrum.converged)
                throw SolverError("eigensolver failed to converge at gamma=" + fmt17(gamma.lo));
            PhaseDiagram diagram;
            diagram.config = {"gamma", config.R, config.r, 0.0, config.m, config.N, bc,
                              config.classify_tol, config.ep_tol};
            diagram.points = {gamma.lo};
            SweepPoint point;
            point.param = gamma.lo;
            point.eigenvalues = spectrum.eigenvalues;
            point.residuals = spectrum.residuals;
            const Classification cls = classify(spectrum.eigenvalues, config.classify_tol);
            point.labels = cls.labels;
            point.broken_fraction = cls.broken_fraction;
            diagram.spectra.push_back(std::move(point));
            summary.points = 1;
            stager.stage("spectrum.csv", spectrum_csv(diagram));
            finish(cls.broken_fraction, cls.broken_fraction);
        } else if (config.command == "sweep-gamma" || config.command == "sweep-r") {
            PhaseDiagram diagram;
            if (config.command == "sweep-gamma") {
                const TorusGeometry geom(config.R, config.r);
                diagram = sweep_gamma(geom, config.m, bc, linspace(gamma.lo, gamma.hi, gamma.steps),
                                      config.N, sweep_options(config));
            } else {
                const RangeSpec rr = parse_range(config.r_range, "--r-range");
                diagram = sweep_r(config.R, config.m, bc, gamma.lo,
                                  linspace(rr.lo, rr.hi, rr.steps), config.N,
                                  sweep_options(config));
            }
            check_failures(diagram);
            summary.points = diagram.points.size();
            summary.ep_count = diagram.eps.size();
            double lo = 1.0, hi = 0.0;
            for (const SweepPoint& point : diagram.spectra) {
                lo = std::min(lo, point.broken_fraction);
                hi = std::max(hi, point.broken_fraction);
            }
            stager.stage("spectrum.csv", spectrum_csv(diagram));
            stager.stage("branch.csv", branch_csv(diagram.branch));
            stager.stage("branch_min.csv", branch_csv(diagram.branch_min));
            stager.stage("eps.json", eps_json(diagram.eps));
            finish(lo, hi);
        } else if (config.command == "eps") {
            const TorusGeometry geom(config.R, config.r);
            const Grid grid(config.N);
            const Window window{gamma.lo, gamma.hi};
            auto eps = eps_from_oracle(geom, config.m, bc, grid, window);
            BisectionOptions bis;
            bis.tol = config.ep_tol;
            bis.scan_points = config.scan_points > 0 ? config.scan_points
                                                     : std::max(2 * gamma.steps, 200);
            std::vector<std::string> warnings;
            auto bisected = eps_by_bisection(make_min_e2_diagnostic(geom, config.m, bc, grid),
                                             window, bis, &warnings);
            eps.insert(eps.end(), bisected.begin(), bisected.end());
            summary.ep_count = eps.size();
            stager.stage("eps.json", eps_json(eps));
            finish(0.0, 0.0);
        } else if (config.command == "proportion-study") {
            std::vector<std::pair<double, double>> sizes;
            for (const std::string& part : split(config.sizes, ',')) {
                const auto rv = split(part, ':');
                sizes.emplace_back(to_double(rv[0], "--sizes"), to_double(rv[1], "--sizes"));
            }
            const double ratio = sizes.front().first / sizes.front().second;
            const ProportionStudy study =
                optimal_proportion_study(ratio, sizes, config.m, bc,
                                         linspace(gamma.lo, gamma.hi, gamma.steps), config.N,
                                         sweep_options(config));
            summary.points = study.rows.size();
            stager.stage("proportion.csv", proportion_csv(study));
            finish(0.0, 0.0);
        } else {  // converge
            const TorusGeometry geom(config.R, config.r);
            std::vector<int> n_values;
            for (const std::string& part : split(config.n_list, ','))
                n_values.push_back(to_int(part, "--N-list"));
            const ConvergenceReport report =
                convergence_study(geom, SpinorMode(config.m, gamma.lo, bc), n_values);
            summary.points = n_values.size();
            stager.stage("convergence.csv", convergence_csv(report));
            finish(0.0, 0.0);
        }
    } catch (...) {
        stager.rollback();
        throw;
    }
    return summary;
}

std::string RunSummary::one_line() const {
    std::ostringstream out;
    out << command << ": " << points << " point(s), " << ep_count << " EP(s), broken fraction ["
        << broken_lo << ", " << broken_hi << "], wall " << wall_seconds << " s";
    return out.str();
}

}  // namespace torusphase
