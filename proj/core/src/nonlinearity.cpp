#include "frontforge/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

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

constexpr double kBandLow = -0.1;
constexpr double kBandHigh = 1.1;
constexpr double kZero = 1e-14;
constexpr int kSignSamples = 2000;

}  // namespace

std::string to_string(ReactionClass cls) {
  switch (cls) {
    case ReactionClass::Bistable: return "Bi";
    case ReactionClass::Ignition: return "Ig";
    case ReactionClass::Monostable: return "Mo";
  }
  return "?";
}

double smoothstep(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double smoothstep_derivative(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double q = t * (1.0 - t);
  return 30.0 * q * q;
}

double smoothstep_second_derivative(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t);
}

double cutoff_chi(double xi) { return smoothstep(std::abs(xi) - 1.0); }

double cutoff_chi_derivative(double xi) {
  const double d = smoothstep_derivative(std::abs(xi) - 1.0);
  return xi < 0.0 ? -d : d;
}

Nonlinearity Nonlinearity::cubic(double theta) {
  if (!(theta > 0.0 && theta < 1.0))
    throw Error(ErrorCode::BadParameters, "cubic threshold must lie in (0,1)");
  return Nonlinearity(CubicBistable{theta});
}

Nonlinearity Nonlinearity::ignition(double theta, double exponent, double scale) {
  if (!(theta > 0.0 && theta < 1.0))
    throw Error(ErrorCode::BadParameters, "ignition threshold must lie in (0,1)");
  if (!(exponent >= 1.0)) throw Error(ErrorCode::BadParameters, "ignition exponent must be >= 1");
  if (!(scale > 0.0)) throw Error(ErrorCode::BadParameters, "ignition scale must be positive");
  return Nonlinearity(IgnitionReaction{theta, exponent, scale});
}

Nonlinearity Nonlinearity::allee(double beta) {
  if (!(beta >= 1.0)) throw Error(ErrorCode::BadParameters, "Allee exponent must be >= 1");
  return Nonlinearity(AlleeMonostable{beta});
}

Nonlinearity Nonlinearity::custom(std::function<double(double)> f,
                                  std::function<double(double)> df, ReactionClass cls,
                                  std::optional<double> theta) {
  if (!f || !df) throw Error(ErrorCode::BadParameters, "custom reaction needs f and f'");
  if (theta && !(*theta > 0.0 && *theta < 1.0))
    throw Error(ErrorCode::BadParameters, "custom threshold must lie in (0,1)");
  return Nonlinearity(CustomReaction{std::move(f), std::move(df), cls, theta});
}

ReactionClass Nonlinearity::declared_class() const {
  if (cutoff_) return ReactionClass::Ignition;
  return std::visit(Overloaded{
                        [](const CubicBistable&) { return ReactionClass::Bistable; },
                        [](const IgnitionReaction&) { return ReactionClass::Ignition; },
                        [](const AlleeMonostable&) { return ReactionClass::Monostable; },
                        [](const CustomReaction& c) { return c.cls; },
                    },
                    kind_);
}

std::optional<double> Nonlinearity::threshold() const {
  if (cutoff_) return 1.0 / *cutoff_;
  return std::visit(Overloaded{
                        [](const CubicBistable& c) -> std::optional<double> { return c.theta; },
                        [](const IgnitionReaction& c) -> std::optional<double> { return c.theta; },
                        [](const AlleeMonostable&) -> std::optional<double> { return std::nullopt; },
                        [](const CustomReaction& c) { return c.theta; },
                    },
                    kind_);
}

std::optional<double> Nonlinearity::beta() const {
  if (const auto* a = std::get_if<AlleeMonostable>(&kind_)) return a->beta;
  return std::nullopt;
}

ReactionValue Nonlinearity::base(double s) const {
  return std::visit(
      Overloaded{
          [s](const CubicBistable& c) {
            const double t = c.theta;
            return ReactionValue{s * (1.0 - s) * (s - t), -3.0 * s * s + 2.0 * (1.0 + t) * s - t};
          },
          [s](const IgnitionReaction& c) {
            if (s <= c.theta) return ReactionValue{0.0, 0.0};
            const double d = s - c.theta;
            const double dp = std::pow(d, c.exponent);
            const double dpm = std::pow(d, c.exponent - 1.0);
            return ReactionValue{c.scale * dp * (1.0 - s),
                                 c.scale * (c.exponent * dpm * (1.0 - s) - dp)};
          },
          [s](const AlleeMonostable& a) {
            const double b = a.beta;
            const double m = std::abs(s);
            const double mb = std::pow(m, b);
            const double mbm = std::pow(m, b - 1.0);
            if (s >= 0.0) return ReactionValue{mb * (1.0 - s), b * mbm * (1.0 - s) - mb};
            return ReactionValue{-mb * (1.0 - s), b * mbm * (1.0 - s) + mb};
          },
          [s](const CustomReaction& c) { return ReactionValue{c.f(s), c.df(s)}; },
      },
      kind_);
}

ReactionValue Nonlinearity::evaluate_unchecked(double s) const {
  ReactionValue r = base(s);
  if (cutoff_) {
    const double n = *cutoff_;
    const double chi = cutoff_chi(n * s);
    const double dchi = n * cutoff_chi_derivative(n * s);
    r = {r.value * chi, r.derivative * chi + r.value * dchi};
  }
  r.value -= shift_ * s;
  r.derivative -= shift_;
  return r;
}

ReactionValue Nonlinearity::evaluate(double s) const {
  if (!(s >= kBandLow && s <= kBandHigh))
    throw Error(ErrorCode::OutOfBand, "argument outside [-0.1, 1.1]");
  return evaluate_unchecked(s);
}

double Nonlinearity::definite_integral(double a, double b) const {
  if (!(a >= 0.0 && a <= b && b <= 1.0)) throw Error(ErrorCode::BadInterval, "need 0 <= a <= b <= 1");
  if (a == b) return 0.0;
  std::vector<double> cuts{a};
  auto add_cut = [&](double x) {
    if (x > a && x < b) cuts.push_back(x);
  };
  if (auto t = threshold()) add_cut(*t);
  if (cutoff_) add_cut(2.0 / *cutoff_);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  auto f = [this](double s) { return value(s); };
  double sum = 0.0;
  for (std::size_t i = 1; i < cuts.size(); ++i)
    sum += quad::integrate(f, cuts[i - 1], cuts[i], {1e-13, 1e-17});
  return sum;
}

Classification Nonlinearity::classify() const {
  Classification out;
  out.cls = declared_class();
  out.theta = threshold();
  out.integral = definite_integral(0.0, 1.0);
  out.well_balanced = std::abs(out.integral) <= 1e-12;
  out.slope_at_zero = evaluate(0.0).derivative;

  auto violation = [](const std::string& what) { throw Error(ErrorCode::ClassViolation, what); };
  if (std::abs(value(0.0)) > 1e-12) violation("f(0) != 0");
  if (shift_ == 0.0 && std::abs(value(1.0)) > 1e-12) violation("f(1) != 0");

  std::vector<double> s(kSignSamples - 1);
  std::vector<double> v(kSignSamples - 1);
  for (int i = 1; i < kSignSamples; ++i) {
    s[i - 1] = static_cast<double>(i) / kSignSamples;
    v[i - 1] = value(s[i - 1]);
  }
  auto sign = [](double x) { return x > kZero ? 1 : (x < -kZero ? -1 : 0); };

  switch (out.cls) {
    case ReactionClass::Monostable:
      for (std::size_t i = 0; i < v.size(); ++i)
        if (sign(v[i]) <= 0 && shift_ == 0.0) violation("monostable term not positive on (0,1)");
      break;
    case ReactionClass::Ignition: {
      const double t = *out.theta;
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (s[i] <= t - 1e-9 && sign(v[i]) != 0) violation("ignition term nonzero below threshold");
        if (s[i] > t + 1e-9 && shift_ == 0.0 && sign(v[i]) <= 0)
          violation("ignition term not positive above threshold");
      }
      break;
    }
    case ReactionClass::Bistable: {
      // Pattern: negative, then positive, then (shifted terms only) negative again.
      std::size_t i = 0;
      while (i < v.size() && sign(v[i]) < 0) ++i;
      if (i == 0) violation("bistable term not negative near 0");
      while (i < v.size() && sign(v[i]) == 0) ++i;
      const std::size_t pos_start = i;
      while (i < v.size() && sign(v[i]) > 0) ++i;
      if (i == pos_start && shift_ == 0.0) violation("bistable term never positive");
      if (shift_ == 0.0 && i < v.size()) violation("bistable sign pattern broken near 1");
      if (shift_ > 0.0)
        for (; i < v.size(); ++i)
          if (sign(v[i]) > 0) violation("shifted bistable term has extra positive lobe");
      if (shift_ == 0.0 && out.theta) {
        const double t = *out.theta;
        if (std::abs(value(t)) > 1e-10) violation("declared threshold is not a root");
      }
      break;
    }
  }
  return out;
}

Nonlinearity Nonlinearity::with_shift(double tau) const {
  if (!(tau >= 0.0)) throw Error(ErrorCode::BadParameters, "shift must be nonnegative");
  Nonlinearity out = *this;
  out.shift_ = tau;
  return out;
}

ShiftResult Nonlinearity::shift_by_tail_mass(double tau) const {
  if (declared_class() != ReactionClass::Bistable)
    throw Error(ErrorCode::WrongClass, "tail-mass shift needs a bistable term");
  if (!(tau >= 0.0)) throw Error(ErrorCode::BadParameters, "shift must be nonnegative");
  Nonlinearity shifted = with_shift(shift_ + tau);
  ShiftResult out{shifted, std::nullopt, std::nullopt};
  if (shifted.shift_ == 0.0) {
    out.largest_root = 1.0;
    out.integral_to_root = shifted.definite_integral(0.0, 1.0);
    return out;
  }
  const double lo = threshold().value_or(0.0);
  auto g = [&shifted](double s) { return shifted.value(s); };
  constexpr int kScan = 20000;
  int last_positive = -1;
  for (int i = 0; i <= kScan; ++i)
    if (g(lo + (1.0 - lo) * i / kScan) > 0.0) last_positive = i;
  if (last_positive < 0 || last_positive == kScan) return out;
  const double a = lo + (1.0 - lo) * last_positive / kScan;
  const double b = lo + (1.0 - lo) * (last_positive + 1) / kScan;
  const double root = quad::bisect(g, a, b, 1e-13);
  out.largest_root = root;
  out.integral_to_root = shifted.definite_integral(0.0, root);
  return out;
}

Nonlinearity Nonlinearity::ignition_cutoff(int n) const {
  if (declared_class() != ReactionClass::Monostable)
    throw Error(ErrorCode::WrongClass, "ignition cutoff needs a monostable term");
  if (n <= 0) throw Error(ErrorCode::BadParameters, "cutoff index must be positive");
  Nonlinearity out = *this;
  out.cutoff_ = n;
  return out;
}

Nonlinearity Nonlinearity::mirrored() const {
  if (const auto* c = std::get_if<CubicBistable>(&kind_); c && shift_ == 0.0 && !cutoff_)
    return cubic(1.0 - c->theta);
  const Nonlinearity self = *this;
  auto t = threshold();
  std::optional<double> mirrored_theta;
  if (t) mirrored_theta = 1.0 - *t;
  return custom([self](double u) { return -self.value(1.0 - u); },
                [self](double u) { return self.evaluate_unchecked(1.0 - u).derivative; },
                declared_class(), mirrored_theta);
}

double Nonlinearity::sup_norm() const {
  double best = 0.0;
  for (int i = 0; i <= 20000; ++i) best = std::max(best, std::abs(value(i / 20000.0)));
  return best;
}

double Nonlinearity::sup_norm_derivative() const {
  double best = 0.0;
  for (int i = 0; i <= 20000; ++i)
    best = std::max(best, std::abs(evaluate_unchecked(i / 20000.0).derivative));
  return best;
}

ReactionValue evaluate(const Nonlinearity& nl, double s) { return nl.evaluate(s); }
double definite_integral(const Nonlinearity& nl, double a, double b) {
  return nl.definite_integral(a, b);
}
Classification classify(const Nonlinearity& nl) { return nl.classify(); }
ShiftResult shift_by_tail_mass(const Nonlinearity& nl, double tau) {
  return nl.shift_by_tail_mass(tau);
}
Nonlinearity ignition_cutoff(const Nonlinearity& nl, int n) { return nl.ignition_cutoff(n); }

}  // namespace frontforge
