#include "frontforge/nonlocal_operator.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include <unsupported/Eigen/FFT>

#include "frontforge/error.hpp"
#include "frontforge/parallel.hpp"

namespace frontforge {

DiscreteOperator::DiscreteOperator(const Measure& m, const Grid& g, double delta) : grid_(g) {
  if (!(delta >= 0.0)) throw Error(ErrorCode::NonPositiveRadius, "operator truncation must be >= 0");
  const Measure mu = delta > 0.0 ? m.truncated(delta) : m;
  const double h = g.spacing();
  const int n = g.nodes();

  if (auto s = mu.fractional_exponent(); s && *s >= 0.9 && mu.epsilon() < 0.5 * h)
    throw Error(ErrorCode::GridTooCoarse,
                "truncation below h/2 with s >= 0.9; refine the grid or raise epsilon");

  const CellMomentTable cells = mu.cell_moments(h, n);
  weights_.assign(static_cast<std::size_t>(n) + 1, 0.0);
  // Cell j spans [j h, (j+1) h]; p/q split the z^2 J mass onto its end nodes.
  for (int j = 0; j < n; ++j) {
    const CellMoment& c = cells.at(j);
    if (c.order2 == 0.0) continue;
    const double q = (c.order3 - j * h * c.order2) / h;
    const double p = c.order2 - q;
    // Node 0 carries the curvature limit, taken equal to the value at node 1.
    const int left_node = std::max(j, 1);
    const double zl = left_node * h;
    const double zr = (j + 1) * h;
    weights_[static_cast<std::size_t>(left_node)] += p / (zl * zl);
    weights_[static_cast<std::size_t>(j + 1)] += q / (zr * zr);
  }
  tail_ = mu.one_sided_moment(0, n * h, kInfinity);

  suffix_.assign(weights_.size() + 1, 0.0);
  for (int k = n; k >= 1; --k)
    suffix_[static_cast<std::size_t>(k)] =
        suffix_[static_cast<std::size_t>(k) + 1] + weights_[static_cast<std::size_t>(k)];
  diagonal_ = -2.0 * (suffix_[1] + tail_);
  reach_ = 0;
  for (int k = n; k >= 1; --k)
    if (weights_[static_cast<std::size_t>(k)] != 0.0) {
      reach_ = k;
      break;
    }
}

double DiscreteOperator::left_weight(int i) const {
  return tail_ + suffix_[static_cast<std::size_t>(i) + 1];
}

double DiscreteOperator::right_weight(int i) const {
  return tail_ + suffix_[static_cast<std::size_t>(grid_.nodes() - i)];
}

void DiscreteOperator::apply(const double* u, double left, double right, double* out) const {
  const int n = grid_.nodes();
  const int k_max = reach_;
  std::vector<double> ext(static_cast<std::size_t>(n + 2 * k_max));
  std::fill(ext.begin(), ext.begin() + k_max, left);
  std::copy(u, u + n, ext.begin() + k_max);
  std::fill(ext.begin() + k_max + n, ext.end(), right);
  const double* e = ext.data() + k_max;

  const double far = tail_ * (left + right);
  for (int i = 0; i < n; ++i) out[i] = diagonal_ * u[i] + far;
  for (int k = 1; k <= k_max; ++k) {
    const double w = weights_[static_cast<std::size_t>(k)];
    if (w == 0.0) continue;
    const double* plus = e + k;
    const double* minus = e - k;
#pragma omp simd
    for (int i = 0; i < n; ++i) out[i] += w * (plus[i] + minus[i]);
  }
}

std::vector<double> DiscreteOperator::apply(const Profile& p) const {
  if (!(p.grid == grid_)) throw Error(ErrorCode::InvalidGrid, "profile grid differs from operator grid");
  std::vector<double> out(p.values.size());
  apply(p.values.data(), p.left_state, p.right_state, out.data());
  return out;
}

void DiscreteOperator::add_to(Eigen::Ref<Eigen::MatrixXd> jac) const {
  const int n = grid_.nodes();
  // Column-major storage: fill column by column.
#pragma omp parallel for num_threads(thread_budget()) schedule(static)
  for (int j = 0; j < n; ++j) {
    double* col = jac.col(j).data();
    const int lo = std::max(0, j - reach_);
    const int hi = std::min(n - 1, j + reach_);
    for (int i = lo; i <= hi; ++i) {
      const int k = std::abs(i - j);
      col[i] += k == 0 ? diagonal_ : weights_[static_cast<std::size_t>(k)];
    }
  }
}

AffineOperator DiscreteOperator::affine() const {
  const int n = grid_.nodes();
  AffineOperator a;
  a.matrix = Eigen::MatrixXd::Zero(n, n);
  add_to(a.matrix);
  a.left_weight.resize(n);
  a.right_weight.resize(n);
  for (int i = 0; i < n; ++i) {
    a.left_weight[i] = left_weight(i);
    a.right_weight[i] = right_weight(i);
  }
  return a;
}

struct FftApply::Plan {
  int n = 0;
  int size = 0;
  double diagonal = 0.0;
  std::vector<double> left_weight;
  std::vector<double> right_weight;
  std::vector<std::complex<double>> kernel_hat;
  mutable Eigen::FFT<double> fft;
  mutable std::vector<double> buffer;
  mutable std::vector<double> result;
  mutable std::vector<std::complex<double>> spectrum;
};

FftApply::FftApply(const DiscreteOperator& op) : plan_(std::make_unique<Plan>()) {
  Plan& p = *plan_;
  p.n = op.grid().nodes();
  const int k_max = std::min(op.reach(), p.n - 1);
  p.size = 1;
  while (p.size < p.n + 2 * k_max) p.size *= 2;
  p.diagonal = op.diagonal();
  p.left_weight.resize(static_cast<std::size_t>(p.n));
  p.right_weight.resize(static_cast<std::size_t>(p.n));
  for (int i = 0; i < p.n; ++i) {
    p.left_weight[static_cast<std::size_t>(i)] = op.left_weight(i);
    p.right_weight[static_cast<std::size_t>(i)] = op.right_weight(i);
  }
  // Circular kernel: weight k at index k and size - k.
  std::vector<double> kernel(static_cast<std::size_t>(p.size), 0.0);
  for (int k = 1; k <= k_max; ++k) {
    kernel[static_cast<std::size_t>(k)] = op.weights()[static_cast<std::size_t>(k)];
    kernel[static_cast<std::size_t>(p.size - k)] = op.weights()[static_cast<std::size_t>(k)];
  }
  p.fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  p.fft.fwd(p.kernel_hat, kernel);
  p.buffer.assign(static_cast<std::size_t>(p.size), 0.0);
}

FftApply::~FftApply() = default;
FftApply::FftApply(FftApply&&) noexcept = default;
FftApply& FftApply::operator=(FftApply&&) noexcept = default;

void FftApply::operator()(const double* u, double left, double right, double* out) const {
  const Plan& p = *plan_;
  std::copy(u, u + p.n, p.buffer.begin());
  std::fill(p.buffer.begin() + p.n, p.buffer.end(), 0.0);
  p.fft.fwd(p.spectrum, p.buffer);
  for (std::size_t k = 0; k < p.spectrum.size(); ++k) p.spectrum[k] *= p.kernel_hat[k];
  p.fft.inv(p.result, p.spectrum, p.size);
  for (int i = 0; i < p.n; ++i) {
    const auto j = static_cast<std::size_t>(i);
    out[i] = p.result[j] + p.diagonal * u[i] + left * p.left_weight[j] + right * p.right_weight[j];
  }
}

std::vector<double> apply(const Measure& m, const Profile& p, double delta) {
  return DiscreteOperator(m, p.grid, delta).apply(p);
}

AffineOperator jacobian(const Measure& m, const Grid& g, double delta) {
  return DiscreteOperator(m, g, delta).affine();
}

double adjoint_defect(const Measure& m, const Profile& phi, const Profile& psi, double delta) {
  const bool bounded = m.bounded_support() ||
                       (delta > 0.0 ? m.truncated(delta).finite_mass() : m.finite_mass());
  if (!bounded) throw Error(ErrorCode::UnboundedSupport, "adjoint defect needs finite mass or support");
  if (!(phi.grid == psi.grid)) throw Error(ErrorCode::InvalidGrid, "phi and psi grids differ");
  const DiscreteOperator op(m, phi.grid, delta);
  const std::vector<double> d_psi = op.apply(psi);
  const std::vector<double> d_phi = op.apply(phi);
  const double h = phi.grid.spacing();
  double lhs = 0.0;
  double rhs = 0.0;
  for (std::size_t i = 0; i < phi.values.size(); ++i) {
    lhs += d_psi[i] * phi.values[i];
    rhs += psi.values[i] * d_phi[i];
  }
  return h * std::abs(lhs - rhs);
}

}  // namespace frontforge
