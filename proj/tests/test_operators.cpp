#include <doctest.h>

#include <cmath>
#include <numbers>

#include "torusphase/eigensolve.hpp"
#include "torusphase/operators.hpp"

using namespace torusphase;

namespace {

constexpr double kPi = std::numbers::pi;

// Smooth periodic test function and its derivative.
double test_fn(double v) { return std::exp(std::sin(v)) + 0.3 * std::cos(2 * v); }
double test_fn_d(double v) { return std::cos(v) * std::exp(std::sin(v)) - 0.6 * std::sin(2 * v); }

Eigen::VectorXd sample_nodes(const Grid& grid, double (*f)(double)) {
    Eigen::VectorXd out(grid.size());
    for (int k = 0; k < grid.size(); ++k) out[k] = f(grid.node(k));
    return out;
}

}  // namespace

TEST_CASE("spinor mode invariants") {
    CHECK_THROWS_AS(SpinorMode(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(SpinorMode(0.5, -0.1), std::invalid_argument);
    CHECK_NOTHROW(SpinorMode(-1.5, 2.0, Bc::antiperiodic));
}

TEST_CASE("dplus applies the first-order bracket to O(h^2) at midpoints") {
    const TorusGeometry geom(10.0, 8.0);
    const SpinorMode mode(0.5, 0.0);
    double prev_err = 0.0;
    std::vector<double> errs;
    for (int n : {64, 128, 256}) {
        const Grid grid(n);
        const Eigen::MatrixXd D = build_dplus(geom, mode, grid);
        const Eigen::VectorXd f = sample_nodes(grid, test_fn);
        const Eigen::VectorXd Df = D * f;
        double err = 0.0;
        for (int k = 0; k < n; ++k) {
            const double vm = grid.midpoint(k);
            const double exact =
                (test_fn_d(vm) + dplus_coefficient(geom, mode.m, vm) * test_fn(vm)) / geom.r;
            err = std::max(err, std::abs(Df[k] - exact));
        }
        errs.push_back(err);
        prev_err = err;
    }
    (void)prev_err;
    const double order1 = std::log2(errs[0] / errs[1]);
    const double order2 = std::log2(errs[1] / errs[2]);
    CHECK(order1 > 1.8);
    CHECK(order1 < 2.2);
    CHECK(order2 > 1.8);
    CHECK(order2 < 2.2);
}

TEST_CASE("dplus coefficient value pinned at v=0") {
    // (1/r) * (r/rho(0)) * (m - 0) = 0.05 for R=10, r=1, m=1/2
    const TorusGeometry geom(10.0, 1.0);
    CHECK(dplus_coefficient(geom, 0.5, 0.0) / geom.r == doctest::Approx(0.05));

    // Applying dplus to the constant vector isolates the multiplication part:
    // (D 1)_k = a(v_{k+1/2}) / r.
    const Grid grid(8);
    const Eigen::MatrixXd D = build_dplus(geom, SpinorMode(0.5, 0.0), grid);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(8);
    const Eigen::VectorXd D1 = D * ones;
    for (int k = 0; k < 8; ++k)
        CHECK(D1[k] ==
              doctest::Approx(dplus_coefficient(geom, 0.5, grid.midpoint(k)) / geom.r).epsilon(1e-13));
}

TEST_CASE("antiperiodic wrap flips the seam couplings only") {
    const TorusGeometry geom(10.0, 8.0);
    const Grid grid(16);
    const Eigen::MatrixXd Dper = build_dplus(geom, SpinorMode(0.5, 0.0, Bc::periodic), grid);
    const Eigen::MatrixXd Danti = build_dplus(geom, SpinorMode(0.5, 0.0, Bc::antiperiodic), grid);
    Eigen::MatrixXd diff = Danti - Dper;
    // Only the (N-1, 0) entry crosses the seam for the node->midpoint stencil.
    CHECK(Danti(15, 0) == doctest::Approx(-Dper(15, 0)));
    diff(15, 0) = 0.0;
    CHECK(diff.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("weighted-adjoint identity is exact by construction") {
    const TorusGeometry geom(10.0, 8.0);
    const Grid grid(32);
    for (Bc bc : {Bc::periodic, Bc::antiperiodic}) {
        const OperatorPair pair = build_operator_pair(geom, SpinorMode(1.5, 0.0, bc), grid);
        const Eigen::MatrixXd reconstructed = pair.node_weight.cwiseInverse().asDiagonal() *
                                              pair.dplus.transpose() *
                                              pair.mid_weight.asDiagonal();
        CHECK((pair.dminus - reconstructed).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("adjoint-constructed dminus matches the direct discretization to O(h^2)") {
    const TorusGeometry geom(10.0, 8.0);
    const SpinorMode mode(0.5, 0.0);
    std::vector<double> errs;
    for (int n : {64, 128, 256}) {
        const Grid grid(n);
        const OperatorPair pair = build_operator_pair(geom, mode, grid);
        const Eigen::MatrixXd direct = build_dminus_direct(geom, mode, grid);
        Eigen::VectorXd g(n);
        for (int k = 0; k < n; ++k) g[k] = test_fn(grid.midpoint(k));
        errs.push_back(((pair.dminus - direct) * g).cwiseAbs().maxCoeff());
    }
    const double order1 = std::log2(errs[0] / errs[1]);
    const double order2 = std::log2(errs[1] / errs[2]);
    CHECK(order1 > 1.8);
    CHECK(order1 < 2.2);
    CHECK(order2 > 1.8);
    CHECK(order2 < 2.2);
}

TEST_CASE("first-order operator: real at gamma 0, H^2 block-diagonal") {
    const TorusGeometry geom(10.0, 8.0);
    const Grid grid(24);
    const int n = grid.size();

    const Eigen::MatrixXcd H0 = build_first_order(geom, SpinorMode(0.5, 0.0), grid);
    CHECK(H0.imag().cwiseAbs().maxCoeff() == 0.0);

    const SpinorMode mode(0.5, 1.3);
    const Eigen::MatrixXcd H = build_first_order(geom, mode, grid);
    const Eigen::MatrixXcd H2 = H * H;
    CHECK(H2.topRightCorner(n, n).cwiseAbs().maxCoeff() == 0.0);
    CHECK(H2.bottomLeftCorner(n, n).cwiseAbs().maxCoeff() == 0.0);

    const OperatorPair pair = build_operator_pair(geom, mode, grid);
    const Eigen::MatrixXd bc_block = pair.dminus * pair.dplus;
    const Eigen::MatrixXcd expected =
        bc_block.cast<std::complex<double>>() -
        mode.gamma * mode.gamma * Eigen::MatrixXcd::Identity(n, n);
    CHECK((H2.topLeftCorner(n, n) - expected).cwiseAbs().maxCoeff() <= 1e-12 * bc_block.norm());
}

TEST_CASE("squared operator: gamma enters as an exact diagonal shift") {
    const TorusGeometry geom(10.0, 8.0);
    const Grid grid(32);
    const SquaredOperator base = build_squared(geom, SpinorMode(0.5, 0.0), grid, SpinSign::plus);
    const SquaredOperator shifted =
        build_squared(geom, SpinorMode(0.5, 2.0), grid, SpinSign::plus);
    const Eigen::MatrixXd diff =
        base.matrix - 4.0 * Eigen::MatrixXd::Identity(32, 32) - shifted.matrix;
    CHECK(diff.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("squared operator ring limit: Fourier levels n^2 + m^2/R^2") {
    const TorusGeometry geom(1000.0, 1.0);
    const Grid grid(512);
    const SquaredOperator op = build_squared(geom, SpinorMode(0.5, 0.0), grid, SpinSign::plus);
    const Eigen::VectorXd vals = eig_symmetric(symmetrize(op.matrix, op.weight));
    const double g = 0.5 * 0.5 / (1000.0 * 1000.0);
    CHECK(std::abs(vals[0] - g) <= 3e-7);  // FD floor dominates the tiny ground level
    CHECK(vals[1] == doctest::Approx(1.0 + g).epsilon(1e-4));
    CHECK(vals[2] == doctest::Approx(1.0 + g).epsilon(1e-4));
    CHECK(vals[3] == doctest::Approx(4.0 + g).epsilon(1e-4));
    CHECK(vals[4] == doctest::Approx(4.0 + g).epsilon(1e-4));
}

TEST_CASE("squared operator: spin signs give identical spectra") {
    const TorusGeometry geom(10.0, 8.0);
    const Grid grid(64);
    for (Bc bc : {Bc::periodic, Bc::antiperiodic}) {
        const SpinorMode mode(0.5, 0.7, bc);
        const SquaredOperator plus = build_squared(geom, mode, grid, SpinSign::plus);
        const SquaredOperator minus = build_squared(geom, mode, grid, SpinSign::minus);
        const Eigen::VectorXd ev_plus = eig_symmetric(symmetrize(plus.matrix, plus.weight));
        const Eigen::VectorXd ev_minus = eig_symmetric(symmetrize(minus.matrix, minus.weight));
        const double scale = std::max(std::abs(ev_plus[0]), ev_plus[ev_plus.size() - 1]);
        CHECK((ev_plus - ev_minus).cwiseAbs().maxCoeff() <= 1e-11 * scale);
    }
}

TEST_CASE("symmetrize: identity, diagonal, spectrum preservation, error path") {
    const Eigen::VectorXd w = (Eigen::VectorXd(4) << 1.0, 2.0, 3.0, 0.5).finished();
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(4, 4);
    CHECK((symmetrize(id, w) - id).cwiseAbs().maxCoeff() == 0.0);

    const Eigen::MatrixXd diag = Eigen::Vector4d(3.0, -1.0, 2.0, 0.25).asDiagonal();
    CHECK((symmetrize(diag, w) - diag).cwiseAbs().maxCoeff() == 0.0);

    // build_squared output: same spectrum after the transform
    const TorusGeometry geom(10.0, 8.0);
    const Grid grid(48);
    const SquaredOperator op = build_squared(geom, SpinorMode(0.5, 0.0), grid, SpinSign::plus);
    const Eigen::MatrixXd sym = symmetrize(op.matrix, op.weight);
    const Eigen::VectorXd direct = eig_symmetric(sym);
    // spectrum of the non-symmetric matrix through the general solver
    const ComplexSpectrum general = eig_general(op.matrix.cast<std::complex<double>>(), false);
    const double scale = direct.cwiseAbs().maxCoeff();
    for (int i = 0; i < direct.size(); ++i) {
        CHECK(std::abs(general.eigenvalues[i].imag()) <= 1e-10 * scale);
        CHECK(std::abs(general.eigenvalues[i].real() - direct[i]) <= 1e-10 * scale);
    }

    // a generic non-symmetrizable matrix must be rejected
    Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(4, 4);
    bad << 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 2, 0, 0, 0;
    CHECK_THROWS_AS(symmetrize(bad, w), std::invalid_argument);

    CHECK_THROWS_AS(symmetrize(id, (Eigen::VectorXd(4) << 1, -1, 1, 1).finished()),
                    std::invalid_argument);
}
