#pragma once

#include <Eigen/Core>

#include "torusphase/grid.hpp"

namespace torusphase {

/// Ring torus, parameterized by the distance R from the symmetry axis to the
/// tube center and the tube radius r.  The profile function is
/// rho(v) = R + r cos v, the distance from the axis at poloidal angle v.
struct TorusGeometry {
    double R;
    double r;

    TorusGeometry(double R_, double r_);
};

/// Sign of the spin projection entering the squared-operator potential.
enum class SpinSign : int { plus = +1, minus = -1 };

/// Profile function and its first two derivatives at a poloidal angle.
struct Profile {
    double value;  // rho   = R + r cos v
    double d1;     // rho'  = -r sin v
    double d2;     // rho'' = -r cos v
};

/// Maps an angle to [0, 2*pi).
double canonicalize_angle(double v);

/// True when 2m is an odd integer (half-odd-integer azimuthal mode).
bool is_half_odd_integer(double m);

Profile profile(const TorusGeometry& geom, double v);

/// Gaussian curvature K(v) = cos v / (r * rho(v)).
double gaussian_curvature(const TorusGeometry& geom, double v);

/// Effective potential of the squared operator,
///   V_s(v) = (m^2 r^2 + s r m rho' + rho'^2/4 - rho rho''/2) / rho^2.
/// Throws std::invalid_argument unless m is a half-odd integer.
double potential(const TorusGeometry& geom, double m, SpinSign s, double v);

/// Quadrature weights w_k = rho(v_k) of the measure rho dv on the node grid.
Eigen::VectorXd weight(const TorusGeometry& geom, const Grid& grid);

/// Total curvature integral over the surface by node quadrature,
///   2*pi*r*h * sum_k K(v_k) rho(v_k).
/// Zero for any even N (genus one).
double total_curvature(const TorusGeometry& geom, const Grid& grid);

}  // namespace torusphase
