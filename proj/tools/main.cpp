#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "torusphase/io.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    for (const std::string& arg : args) {
        if (arg == "-h" || arg == "--help") {
            std::cout
                << "torusphase — spectra and PT phase transitions of a Dirac fermion with\n"
                   "imaginary mass on a torus surface.\n\n"
                   "usage: torusphase --command CMD [options]\n"
                   "  commands: spectrum | sweep-gamma | sweep-r | eps | proportion-study | converge\n"
                   "  common:   --R --r --m --gamma VALUE|MIN:MAX:STEPS --N --bc periodic|antiperiodic\n"
                   "            --out DIR (default $TORUSPHASE_OUTDIR or .)  --config FILE\n"
                   "            --classify-tol --ep-tol --scan-points --threads --no-eigenvectors\n"
                   "  sweep-r:  --r-range MIN:MAX:STEPS  (with --gamma fixed)\n"
                   "  study:    --sizes R:r,R:r,...      (fixed ratio R/r)\n"
                   "  converge: --N-list N1,N2,N3        (each double the previous)\n"
                   "outputs: spectrum.csv, branch.csv, branch_min.csv, eps.json, proportion.csv,\n"
                   "         convergence.csv, manifest.txt (manifest re-runs via --config)\n";
            return 0;
        }
        if (arg == "--version") {
            std::cout << "torusphase " << torusphase::kVersion << "\n";
            return 0;
        }
    }

    try {
        const torusphase::RunConfig config = torusphase::parse_config(args);
        const torusphase::RunSummary summary = torusphase::run(config);
        std::cout << summary.one_line() << "\n";
        return 0;
    } catch (const torusphase::ConfigError& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return 2;
    } catch (const torusphase::SolverError& err) {
        std::cerr << "solver error: " << err.what() << "\n";
        return 1;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
}
