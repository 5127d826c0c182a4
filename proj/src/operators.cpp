#include "torusphase/operators.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace torusphase {

SpinorMode::SpinorMode(double m_, double gamma_, Bc bc_) : m(m_), gamma(gamma_), bc(bc_) {
    if (!is_half_odd_integer(m))
        throw std::invalid_argument("SpinorMode: 2m must be an odd integer, got m=" +
                                    std::to_string(m_));
    if (!(gamma >= 0.0) || !std::isfinite(gamma))
        throw std::invalid_argument("SpinorMode: gamma must be >= 0, got " +
                                    std::to_string(gamma_));
}

double dplus_coefficient(const TorusGeometry& geom, double m, double v) {
    const double w = canonicalize_angle(v);
    return geom.r / profile(geom, w).value * (m - 0.5 * std::sin(w));
}

Eigen::MatrixXd build_dplus(const TorusGeometry& geom, const SpinorMode& mode, const Grid& grid) {
    const int N = grid.size();
    const double h = grid.spacing();
    const double seam = (mode.bc == Bc::antiperiodic) ? -1.0 : 1.0;
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(N, N);
    // Row k lives at midpoint v_{k+1/2}; couples nodes k and k+1.
    for (int k = 0; k < N; ++k) {
        const double a = dplus_coefficient(geom, mode.m, grid.midpoint(k));
        const int kp = (k + 1) % N;
        const double wrap = (k == N - 1) ? seam : 1.0;
        D(k, k) += -1.0 / h + 0.5 * a;
        D(k, kp) += wrap * (1.0 / h + 0.5 * a);
    }
    return D / geom.r;
}

Eigen::MatrixXd build_dminus_direct(const TorusGeometry& geom, const SpinorMode& mode,
                                    const Grid& grid) {
    const int N = grid.size();
    const double h = grid.spacing();
    const double seam = (mode.bc == Bc::antiperiodic) ? -1.0 : 1.0;
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(N, N);
    // Row k lives at node v_k; couples midpoints k-1/2 and k+1/2, i.e.
    // staggered indices k-1 and k.  b(v) = (r/rho)(m + sin v/2).
    for (int k = 0; k < N; ++k) {
        const double vk = grid.node(k);
        const double b = geom.r / profile(geom, vk).value * (mode.m + 0.5 * std::sin(vk));
        const int km = (k - 1 + N) % N;
        const double wrap = (k == 0) ? seam : 1.0;
        D(k, k) += -1.0 / h + 0.5 * b;
        D(k, km) += wrap * (1.0 / h + 0.5 * b);
    }
    return -D / geom.r;
}

OperatorPair build_operator_pair(const TorusGeometry& geom, const SpinorMode& mode,
                                 const Grid& grid) {
    OperatorPair pair;
    pair.dplus = build_dplus(geom, mode, grid);
    pair.node_weight = weight(geom, grid);
    pair.mid_weight.resize(grid.size());
    for (int k = 0; k < grid.size(); ++k)
        pair.mid_weight[k] = profile(geom, grid.midpoint(k)).value;
    pair.dminus = pair.node_weight.cwiseInverse().asDiagonal() * pair.dplus.transpose() *
                  pair.mid_weight.asDiagonal();
    return pair;
}

Eigen::MatrixXcd build_first_order(const TorusGeometry& geom, const SpinorMode& mode,
                                   const Grid& grid) {
    const int N = grid.size();
    const OperatorPair pair = build_operator_pair(geom, mode, grid);
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(2 * N, 2 * N);
    const std::complex<double> ig(0.0, mode.gamma);
    H.topLeftCorner(N, N) = -ig * Eigen::MatrixXcd::Identity(N, N);
    H.topRightCorner(N, N) = pair.dminus.cast<std::complex<double>>();
    H.bottomLeftCorner(N, N) = pair.dplus.cast<std::complex<double>>();
    H.bottomRightCorner(N, N) = ig * Eigen::MatrixXcd::Identity(N, N);
    return H;
}

SquaredOperator build_squared(const TorusGeometry& geom, const SpinorMode& mode, const Grid& grid,
                              SpinSign s) {
    const int N = grid.size();
    const double h = grid.spacing();
    const double seam = (mode.bc == Bc::antiperiodic) ? -1.0 : 1.0;
    const double inv_r2 = 1.0 / (geom.r * geom.r);

    SquaredOperator out;
    out.matrix = Eigen::MatrixXd::Zero(N, N);
    out.weight = weight(geom, grid);

    for (int k = 0; k < N; ++k) {
        const double rho_k = out.weight[k];
        const double rho_p = profile(geom, grid.midpoint(k)).value;              // v_{k+1/2}
        const double rho_m = profile(geom, grid.midpoint((k - 1 + N) % N)).value;  // v_{k-1/2}
        const int kp = (k + 1) % N;
        const int km = (k - 1 + N) % N;
        const double wrap_p = (k == N - 1) ? seam : 1.0;
        const double wrap_m = (k == 0) ? seam : 1.0;
        const double scale = inv_r2 / (rho_k * h * h);
        out.matrix(k, k) += scale * (rho_p + rho_m);
        out.matrix(k, kp) -= wrap_p * scale * rho_p;
        out.matrix(k, km) -= wrap_m * scale * rho_m;
        out.matrix(k, k) += inv_r2 * potential(geom, mode.m, s, grid.node(k));
        out.matrix(k, k) -= mode.gamma * mode.gamma;
    }
    return out;
}

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& matrix, const Eigen::VectorXd& weight,
                           double tol) {
    if (matrix.rows() != matrix.cols())
        throw std::invalid_argument("symmetrize: matrix must be square");
    if (weight.size() != matrix.rows())
        throw std::invalid_argument("symmetrize: weight size mismatch");
    if ((weight.array() <= 0.0).any())
        throw std::invalid_argument("symmetrize: weight must be strictly positive");

    const Eigen::VectorXd sqrt_w = weight.array().sqrt();
    Eigen::MatrixXd T =
        sqrt_w.asDiagonal() * matrix * sqrt_w.cwiseInverse().asDiagonal();
    const double scale = T.cwiseAbs().maxCoeff();
    const double asym = (T - T.transpose()).cwiseAbs().maxCoeff();
    if (scale > 0.0 && asym > tol * scale)
        throw std::invalid_argument(
            "symmetrize: input is not symmetrizable by this weight (relative asymmetry " +
            std::to_string(asym / scale) + ")");
    return 0.5 * (T + T.transpose()).eval();
}

}  // namespace torusphase
