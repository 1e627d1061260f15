#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace frontforge {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// J(z) = amplitude |z|^{-1-2s}, optionally cut off at |z| >= outer_cut.
struct FractionalKernel {
  double s = 0.5;
  double amplitude = 1.0;
  std::optional<double> outer_cut;
};

// Even density evaluated on z > 0, zero for |z| > support_radius.
struct DensityKernel {
  std::function<double(double)> density;
  double support_radius = kInfinity;
};

// Piecewise-linear even density through (nodes[i], values[i]), zero past nodes.back().
struct TabulatedKernel {
  std::vector<double> nodes;
  std::vector<double> values;
};

struct MomentSummary {
  double m_levy = 0.0;                 // int min(1, z^2) dmu
  std::optional<double> m_first;       // int min(|z|, z^2) dmu, nullopt if divergent
};

// Per-cell moments of mu over [k h, (k+1) h]. Orders 0 and 1 can diverge on the
// cells touching the origin of an untruncated singular kernel.
struct CellMoment {
  double lo = 0.0;
  double hi = 0.0;
  std::optional<double> order0;
  std::optional<double> order1;
  double order2 = 0.0;
  double order3 = 0.0;
};

class CellMomentTable {
 public:
  CellMomentTable(double spacing, int half_width, std::vector<CellMoment> cells)
      : spacing_(spacing), half_width_(half_width), cells_(std::move(cells)) {}

  double spacing() const { return spacing_; }
  int half_width() const { return half_width_; }
  // Cell [k h, (k+1) h] for k in [-half_width, half_width).
  const CellMoment& at(int k) const { return cells_.at(static_cast<std::size_t>(k + half_width_)); }

 private:
  double spacing_;
  int half_width_;
  std::vector<CellMoment> cells_;
};

// Symmetric diffuse Levy measure with small-jump truncation and support restriction.
// Values are immutable; modifiers return new descriptors.
class Measure {
 public:
  using Kind = std::variant<FractionalKernel, DensityKernel, TabulatedKernel>;

  static Measure fractional(double s, double amplitude = 1.0,
                            std::optional<double> outer_cut = std::nullopt);
  static Measure density(std::function<double(double)> density,
                         double support_radius = kInfinity);
  static Measure uniform(double half_width, double height = 1.0);
  static Measure tabulated(std::vector<double> nodes, std::vector<double> values);

  Measure truncated(double eps) const;
  Measure restricted(double radius) const;

  const Kind& kind() const { return kind_; }
  double epsilon() const { return epsilon_; }
  double restrict_radius() const { return restrict_radius_; }
  // Largest |z| in the support after restriction (may be infinite).
  double outer_radius() const;
  bool bounded_support() const { return outer_radius() < kInfinity; }
  bool finite_mass() const;
  std::optional<double> fractional_exponent() const;

  // One-sided density J(z) for z > 0 with truncation and restriction applied.
  double density_at(double z) const;

  double mass_tail(double r) const;
  std::optional<double> total_mass() const;
  MomentSummary moments() const;
  double window_second_moment(double delta) const;
  CellMomentTable cell_moments(double spacing, int half_width_cells) const;

  // int_a^b z^p J(z) dz over the effective support on z > 0; +inf when divergent.
  double one_sided_moment(int p, double a, double b) const;
  // int_a^b phi(z) J(z) dz over the effective support, a >= 0, b finite.
  double one_sided_integral(const std::function<double(double)>& phi, double a, double b) const;

 private:
  explicit Measure(Kind kind) : kind_(std::move(kind)) {}
  void validate() const;
  double native_radius() const;
  double generic_moment(int p, double a, double b) const;

  Kind kind_;
  double epsilon_ = 0.0;
  double restrict_radius_ = kInfinity;
};

double mass_tail(const Measure& m, double r);
Measure truncate_small(const Measure& m, double eps);
MomentSummary moments(const Measure& m);
double window_second_moment(const Measure& m, double delta);
CellMomentTable cell_moments(const Measure& m, double spacing, int half_width_cells);

}  // namespace frontforge
