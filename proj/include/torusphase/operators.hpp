#pragma once

#include <Eigen/Core>

#include "torusphase/geometry.hpp"
#include "torusphase/grid.hpp"

namespace torusphase {

/// Azimuthal mode data: half-odd-integer quantum number m, gain/loss
/// strength gamma >= 0, and the spin structure around the v-circle.
struct SpinorMode {
    double m;
    double gamma;
    Bc bc;

    SpinorMode(double m_, double gamma_, Bc bc_ = Bc::periodic);
};

/// First-order operator pair on the staggered grid.  dplus discretizes
/// (1/r)[d/dv + (r/rho)(m - sin v/2)] mapping node values (psi_1) to
/// midpoint values (psi_2's grid); dminus is its exact adjoint under the
/// trapezoid inner products with weights rho(v_k) / rho(v_{k+1/2}),
///   dminus = Wn^{-1} * dplus^T * Wm,
/// which discretizes -(1/r)[d/dv - (r/rho)(m + sin v/2)] to O(h^2).
struct OperatorPair {
    Eigen::MatrixXd dplus;
    Eigen::MatrixXd dminus;
    Eigen::VectorXd node_weight;
    Eigen::VectorXd mid_weight;
};

/// Coefficient a(v) = (r/rho(v)) (m - sin(v)/2) of the dplus bracket.
double dplus_coefficient(const TorusGeometry& geom, double m, double v);

Eigen::MatrixXd build_dplus(const TorusGeometry& geom, const SpinorMode& mode, const Grid& grid);

OperatorPair build_operator_pair(const TorusGeometry& geom, const SpinorMode& mode,
                                 const Grid& grid);

/// Direct discretization of the psi_2 -> psi_1 operator
/// -(1/r)[d/dv - (r/rho)(m + sin v/2)] on the staggered grid, used only as
/// a consistency check against the adjoint-constructed dminus.
Eigen::MatrixXd build_dminus_direct(const TorusGeometry& geom, const SpinorMode& mode,
                                    const Grid& grid);

/// Assembles the 2N x 2N first-order operator
///   H = [[-i*gamma*I, dminus], [dplus, +i*gamma*I]],
/// acting on (psi_1 at nodes, psi_2 at midpoints).
Eigen::MatrixXcd build_first_order(const TorusGeometry& geom, const SpinorMode& mode,
                                   const Grid& grid);

struct SquaredOperator {
    Eigen::MatrixXd matrix;
    Eigen::VectorXd weight;
};

/// Second-order operator (1/r^2){ -(1/rho) d(rho d) + V_s(v) } - gamma^2,
/// assembled in conservative form with rho at midpoints; its eigenvalues
/// approximate E^2.
SquaredOperator build_squared(const TorusGeometry& geom, const SpinorMode& mode, const Grid& grid,
                              SpinSign s);

/// Similarity transform W^{1/2} A W^{-1/2} for strictly positive weight,
/// returned explicitly symmetrized.  Throws std::invalid_argument when the
/// transformed matrix deviates from symmetry by more than tol (relative),
/// which indicates an assembly bug upstream.
Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& matrix, const Eigen::VectorXd& weight,
                           double tol = 1e-12);

}  // namespace torusphase
