#include "torusphase/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace torusphase {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

TorusGeometry::TorusGeometry(double R_, double r_) : R(R_), r(r_) {
    if (!(R > 0.0) || !std::isfinite(R))
        throw std::invalid_argument("TorusGeometry: R must be positive, got " + std::to_string(R_));
    if (!(r > 0.0) || !std::isfinite(r))
        throw std::invalid_argument("TorusGeometry: r must be positive, got " + std::to_string(r_));
    if (!(r < R))
        throw std::invalid_argument("TorusGeometry: r must be < R (ring torus), got r=" +
                                    std::to_string(r_) + ", R=" + std::to_string(R_));
}

Grid::Grid(int N) : N_(N), h_(kTwoPi / N) {
    if (N < 8 || N % 2 != 0)
        throw std::invalid_argument("Grid: N must be even and >= 8, got " + std::to_string(N));
}

Eigen::VectorXd Grid::nodes() const {
    Eigen::VectorXd v(N_);
    for (int k = 0; k < N_; ++k) v[k] = node(k);
    return v;
}

Eigen::VectorXd Grid::midpoints() const {
    Eigen::VectorXd v(N_);
    for (int k = 0; k < N_; ++k) v[k] = midpoint(k);
    return v;
}

double canonicalize_angle(double v) {
    double w = std::fmod(v, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    return w;
}

bool is_half_odd_integer(double m) {
    const double twice = 2.0 * m;
    const double nearest = std::round(twice);
    if (std::abs(twice - nearest) > 1e-9) return false;
    return std::llround(std::abs(nearest)) % 2 == 1;
}

Profile profile(const TorusGeometry& geom, double v) {
    const double w = canonicalize_angle(v);
    const double c = std::cos(w);
    const double s = std::sin(w);
    return Profile{geom.R + geom.r * c, -geom.r * s, -geom.r * c};
}

double gaussian_curvature(const TorusGeometry& geom, double v) {
    const double w = canonicalize_angle(v);
    return std::cos(w) / (geom.r * (geom.R + geom.r * std::cos(w)));
}

double potential(const TorusGeometry& geom, double m, SpinSign s, double v) {
    if (!is_half_odd_integer(m))
        throw std::invalid_argument("potential: m must be a half-odd integer, got " +
                                    std::to_string(m));
    const Profile p = profile(geom, v);
    const double sgn = static_cast<double>(static_cast<int>(s));
    const double bracket = m * m * geom.r * geom.r + sgn * geom.r * m * p.d1 +
                           0.25 * p.d1 * p.d1 - 0.5 * p.value * p.d2;
    return bracket / (p.value * p.value);
}

Eigen::VectorXd weight(const TorusGeometry& geom, const Grid& grid) {
    Eigen::VectorXd w(grid.size());
    for (int k = 0; k < grid.size(); ++k) w[k] = profile(geom, grid.node(k)).value;
    return w;
}

double total_curvature(const TorusGeometry& geom, const Grid& grid) {
    // Kahan summation; each term is K*rho*r = cos(v_k).
    double sum = 0.0, comp = 0.0;
    for (int k = 0; k < grid.size(); ++k) {
        const double term =
            gaussian_curvature(geom, grid.node(k)) * profile(geom, grid.node(k)).value * geom.r;
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return kTwoPi * grid.spacing() * sum;
}

}  // namespace torusphase
