#pragma once

#include <Eigen/Core>

namespace torusphase {

/// Spin structure around the poloidal circle.
enum class Bc { periodic, antiperiodic };

/// Uniform periodic grid on v in [0, 2*pi): nodes v_k = 2*pi*k/N and the
/// staggered midpoints v_k + h/2.  N must be even (the node set is then
/// symmetric under v -> -v) and at least 8.
class Grid {
  public:
    explicit Grid(int N);

    int size() const { return N_; }
    double spacing() const { return h_; }

    double node(int k) const { return h_ * k; }
    double midpoint(int k) const { return h_ * k + 0.5 * h_; }

    Eigen::VectorXd nodes() const;
    Eigen::VectorXd midpoints() const;

  private:
    int N_;
    double h_;
};

}  // namespace torusphase
