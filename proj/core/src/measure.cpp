#include "frontforge/measure.hpp"

#include <algorithm>
#include <cmath>

#include "frontforge/error.hpp"
#include "frontforge/quadrature.hpp"

namespace frontforge {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// amplitude * int_a^b z^{q-1} dz with 0 <= a < b <= inf.
double power_integral(double amplitude, double q, double a, double b) {
  if (std::abs(q) < 1e-14) {
    if (a == 0.0 || std::isinf(b)) return kInfinity;
    return amplitude * std::log1p((b - a) / a);
  }
  if (a == 0.0 && q < 0.0) return kInfinity;
  if (std::isinf(b)) {
    if (q > 0.0) return kInfinity;
    return amplitude * std::pow(a, q) / (-q);
  }
  if (a == 0.0) return amplitude * std::pow(b, q) / q;
  // a^q (exp(q log(b/a)) - 1) / q keeps precision on narrow cells far from 0.
  return amplitude * std::pow(a, q) * std::expm1(q * std::log1p((b - a) / a)) / q;
}

double tabulated_density(const TabulatedKernel& t, double z) {
  const auto& x = t.nodes;
  if (z < x.front() || z > x.back()) return 0.0;
  auto it = std::upper_bound(x.begin(), x.end(), z);
  if (it == x.end()) return t.values.back();
  const std::size_t j = static_cast<std::size_t>(it - x.begin());
  const double w = (z - x[j - 1]) / (x[j] - x[j - 1]);
  return (1.0 - w) * t.values[j - 1] + w * t.values[j];
}

}  // namespace

Measure Measure::fractional(double s, double amplitude, std::optional<double> outer_cut) {
  Measure m(FractionalKernel{s, amplitude, outer_cut});
  m.validate();
  return m;
}

Measure Measure::density(std::function<double(double)> density, double support_radius) {
  Measure m(DensityKernel{std::move(density), support_radius});
  m.validate();
  return m;
}

Measure Measure::uniform(double half_width, double height) {
  if (!(half_width > 0.0)) throw Error(ErrorCode::NonPositiveRadius, "uniform half width");
  if (!(height > 0.0)) throw Error(ErrorCode::InvalidMeasure, "uniform height must be positive");
  return density([height](double) { return height; }, half_width);
}

Measure Measure::tabulated(std::vector<double> nodes, std::vector<double> values) {
  Measure m(TabulatedKernel{std::move(nodes), std::move(values)});
  m.validate();
  return m;
}

void Measure::validate() const {
  std::visit(
      Overloaded{
          [](const FractionalKernel& k) {
            if (!(k.s > 0.0 && k.s < 1.0))
              throw Error(ErrorCode::InvalidMeasure, "fractional exponent must lie in (0,1)");
            if (!(k.amplitude > 0.0) || !std::isfinite(k.amplitude))
              throw Error(ErrorCode::InvalidMeasure, "fractional amplitude must be positive");
            if (k.outer_cut && !(*k.outer_cut > 0.0))
              throw Error(ErrorCode::NonPositiveRadius, "outer cut");
          },
          [this](const DensityKernel& k) {
            if (!k.density) throw Error(ErrorCode::InvalidMeasure, "density function is empty");
            if (!(k.support_radius > 0.0))
              throw Error(ErrorCode::NonPositiveRadius, "density support radius");
            const double r = k.support_radius;
            for (int i = 1; i <= 64; ++i) {
              const double z = std::isinf(r) ? 0.25 * i : r * i / 64.0;
              const double v = k.density(z);
              if (!(v >= 0.0) || !std::isfinite(v))
                throw Error(ErrorCode::InvalidMeasure, "density must be finite and nonnegative");
            }
            auto second = [&k](double z) { return z * z * k.density(z); };
            const auto near = quad::integrate_estimate(second, 0.0, std::min(1.0, r));
            if (!near.converged || !std::isfinite(near.value))
              throw Error(ErrorCode::InvalidMeasure, "int_{|z|<1} z^2 dmu does not converge");
            if (r > 1.0 && !std::isfinite(generic_moment(0, 1.0, r)))
              throw Error(ErrorCode::InvalidMeasure, "int_{|z|>1} dmu does not converge");
          },
          [](const TabulatedKernel& k) {
            if (k.nodes.size() < 2 || k.nodes.size() != k.values.size())
              throw Error(ErrorCode::InvalidMeasure, "tabulated kernel needs matching nodes/values");
            if (k.nodes.front() < 0.0)
              throw Error(ErrorCode::InvalidMeasure, "tabulated nodes must be nonnegative");
            for (std::size_t i = 1; i < k.nodes.size(); ++i)
              if (!(k.nodes[i] > k.nodes[i - 1]))
                throw Error(ErrorCode::InvalidMeasure, "tabulated nodes must increase");
            for (double v : k.values)
              if (!(v >= 0.0) || !std::isfinite(v))
                throw Error(ErrorCode::InvalidMeasure, "tabulated values must be nonnegative");
          },
      },
      kind_);
}

Measure Measure::truncated(double eps) const {
  if (!(eps > 0.0)) throw Error(ErrorCode::NonPositiveRadius, "truncation radius");
  Measure out = *this;
  out.epsilon_ = std::max(epsilon_, eps);
  return out;
}

Measure Measure::restricted(double radius) const {
  if (!(radius > 0.0)) throw Error(ErrorCode::NonPositiveRadius, "restriction radius");
  Measure out = *this;
  out.restrict_radius_ = std::min(restrict_radius_, radius);
  return out;
}

double Measure::native_radius() const {
  return std::visit(Overloaded{
                        [](const FractionalKernel& k) { return k.outer_cut.value_or(kInfinity); },
                        [](const DensityKernel& k) { return k.support_radius; },
                        [](const TabulatedKernel& k) { return k.nodes.back(); },
                    },
                    kind_);
}

double Measure::outer_radius() const { return std::min(native_radius(), restrict_radius_); }

bool Measure::finite_mass() const { return std::isfinite(one_sided_moment(0, 0.0, kInfinity)); }

std::optional<double> Measure::fractional_exponent() const {
  if (const auto* k = std::get_if<FractionalKernel>(&kind_)) return k->s;
  return std::nullopt;
}

double Measure::density_at(double z) const {
  z = std::abs(z);
  if (z <= epsilon_ || z > outer_radius() || z == 0.0) return 0.0;
  return std::visit(
      Overloaded{
          [z](const FractionalKernel& k) {
            if (k.outer_cut && z >= *k.outer_cut) return 0.0;
            return k.amplitude * std::pow(z, -1.0 - 2.0 * k.s);
          },
          [z](const DensityKernel& k) { return k.density(z); },
          [z](const TabulatedKernel& k) { return tabulated_density(k, z); },
      },
      kind_);
}

double Measure::generic_moment(int p, double a, double b) const {
  auto integrand = [this, p](double z) { return std::pow(z, p) * density_at(z); };
  if (const auto* t = std::get_if<TabulatedKernel>(&kind_)) {
    // Exact on every linear piece once split at the nodes.
    double sum = 0.0;
    double lo = a;
    for (double node : t->nodes) {
      if (node <= lo) continue;
      const double hi = std::min(node, b);
      sum += quad::integrate(integrand, lo, hi);
      lo = hi;
      if (lo >= b) break;
    }
    return sum;
  }
  if (std::isfinite(b)) return quad::integrate(integrand, a, b);
  double head = 0.0;
  double start = a;
  if (a < 1.0) {
    head = quad::integrate(integrand, a, 1.0);
    start = 1.0;
  }
  const auto tail = quad::integrate_to_infinity(integrand, start);
  return tail ? head + *tail : kInfinity;
}

double Measure::one_sided_moment(int p, double a, double b) const {
  const double lo = std::max({a, epsilon_, 0.0});
  const double hi = std::min(b, outer_radius());
  if (!(hi > lo)) return 0.0;
  if (const auto* k = std::get_if<FractionalKernel>(&kind_))
    return power_integral(k->amplitude, p - 2.0 * k->s, lo, hi);
  return generic_moment(p, lo, hi);
}

double Measure::one_sided_integral(const std::function<double(double)>& phi, double a,
                                   double b) const {
  const double lo = std::max({a, epsilon_, 0.0});
  const double hi = std::min(b, outer_radius());
  if (!(hi > lo)) return 0.0;
  if (!std::isfinite(hi))
    throw Error(ErrorCode::UnboundedSupport, "one-sided integral needs a finite upper limit");
  return quad::integrate([&](double z) { return phi(z) * density_at(z); }, lo, hi);
}

double Measure::mass_tail(double r) const {
  if (!(r > 0.0)) throw Error(ErrorCode::NonPositiveRadius, "mass_tail radius");
  return 2.0 * one_sided_moment(0, r, kInfinity);
}

std::optional<double> Measure::total_mass() const {
  const double half = one_sided_moment(0, 0.0, kInfinity);
  if (!std::isfinite(half)) return std::nullopt;
  return 2.0 * half;
}

MomentSummary Measure::moments() const {
  const double inner = one_sided_moment(2, 0.0, 1.0);
  MomentSummary out;
  out.m_levy = 2.0 * (inner + one_sided_moment(0, 1.0, kInfinity));
  const double first = one_sided_moment(1, 1.0, kInfinity);
  if (std::isfinite(first)) out.m_first = 2.0 * (inner + first);
  return out;
}

double Measure::window_second_moment(double delta) const {
  if (!(delta > 0.0)) throw Error(ErrorCode::NonPositiveRadius, "window radius");
  return 2.0 * one_sided_moment(2, 0.0, delta);
}

CellMomentTable Measure::cell_moments(double spacing, int half_width_cells) const {
  if (!(spacing > 0.0)) throw Error(ErrorCode::NonPositiveRadius, "cell spacing");
  if (half_width_cells <= 0) throw Error(ErrorCode::BadParameters, "half width must be positive");
  const int k_max = half_width_cells;
  std::vector<CellMoment> positive(static_cast<std::size_t>(k_max));
  const double outer = outer_radius();
  for (int k = 0; k < k_max; ++k) {
    CellMoment& c = positive[static_cast<std::size_t>(k)];
    c.lo = k * spacing;
    c.hi = (k + 1) * spacing;
    if (c.lo >= outer) {
      c.order0 = 0.0;
      c.order1 = 0.0;
      continue;
    }
    const double m0 = one_sided_moment(0, c.lo, c.hi);
    const double m1 = one_sided_moment(1, c.lo, c.hi);
    if (std::isfinite(m0)) c.order0 = m0;
    if (std::isfinite(m1)) c.order1 = m1;
    c.order2 = one_sided_moment(2, c.lo, c.hi);
    c.order3 = one_sided_moment(3, c.lo, c.hi);
  }
  std::vector<CellMoment> cells(static_cast<std::size_t>(2 * k_max));
  for (int k = -k_max; k < k_max; ++k) {
    CellMoment& c = cells[static_cast<std::size_t>(k + k_max)];
    if (k >= 0) {
      c = positive[static_cast<std::size_t>(k)];
      continue;
    }
    const CellMoment& mirror = positive[static_cast<std::size_t>(-k - 1)];
    c.lo = -mirror.hi;
    c.hi = -mirror.lo;
    c.order0 = mirror.order0;
    if (mirror.order1) c.order1 = -*mirror.order1;
    c.order2 = mirror.order2;
    c.order3 = -mirror.order3;
  }
  return {spacing, half_width_cells, std::move(cells)};
}

double mass_tail(const Measure& m, double r) { return m.mass_tail(r); }
Measure truncate_small(const Measure& m, double eps) { return m.truncated(eps); }
MomentSummary moments(const Measure& m) { return m.moments(); }
double window_second_moment(const Measure& m, double delta) {
  return m.window_second_moment(delta);
}
CellMomentTable cell_moments(const Measure& m, double spacing, int half_width_cells) {
  return m.cell_moments(spacing, half_width_cells);
}

}  // namespace frontforge
