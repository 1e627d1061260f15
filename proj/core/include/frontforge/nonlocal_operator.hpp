#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "frontforge/grid.hpp"
#include "frontforge/measure.hpp"

namespace frontforge {

// apply(u) = matrix * u + left_weight * left_state + right_weight * right_state.
struct AffineOperator {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd left_weight;
  Eigen::VectorXd right_weight;
};

// Toeplitz discretization of D_mu truncated at delta on a uniform grid.
//
// D u(x) = int_0^inf [u(x+z) + u(x-z) - 2u(x)] J(z) dz. The quotient
// g(z) = (u(x+z) + u(x-z) - 2u(x)) / z^2 is interpolated piecewise linearly
// between nodes z = k h and integrated against the exact cell moments of z^2 J,
// so quadratics are reproduced and every off-diagonal weight is nonnegative.
// Jumps beyond the grid (|z| > N h) act on the far-field states only.
class DiscreteOperator {
 public:
  DiscreteOperator(const Measure& m, const Grid& g, double delta = 0.0);

  const Grid& grid() const { return grid_; }
  // weights()[k] multiplies u(x + k h) + u(x - k h); entry 0 is unused.
  const std::vector<double>& weights() const { return weights_; }
  double tail_weight() const { return tail_; }
  double diagonal() const { return diagonal_; }
  int reach() const { return reach_; }

  void apply(const double* u, double left, double right, double* out) const;
  std::vector<double> apply(const Profile& p) const;
  AffineOperator affine() const;
  // Adds the N x N block to the top-left corner of jac.
  void add_to(Eigen::Ref<Eigen::MatrixXd> jac) const;
  double left_weight(int i) const;
  double right_weight(int i) const;

 private:
  Grid grid_;
  std::vector<double> weights_;
  std::vector<double> suffix_;  // suffix_[k] = sum_{j >= k} weights_[j]
  double tail_ = 0.0;
  double diagonal_ = 0.0;
  int reach_ = 0;
};

// Same action as DiscreteOperator::apply with the in-grid Toeplitz sum done by FFT,
// for long-reach kernels on large grids. Holds scratch buffers: one per thread.
class FftApply {
 public:
  explicit FftApply(const DiscreteOperator& op);
  ~FftApply();
  FftApply(FftApply&&) noexcept;
  FftApply& operator=(FftApply&&) noexcept;

  void operator()(const double* u, double left, double right, double* out) const;

 private:
  struct Plan;
  std::unique_ptr<Plan> plan_;
};

std::vector<double> apply(const Measure& m, const Profile& p, double delta);
double adjoint_defect(const Measure& m, const Profile& phi, const Profile& psi, double delta);
AffineOperator jacobian(const Measure& m, const Grid& g, double delta);

}  // namespace frontforge
