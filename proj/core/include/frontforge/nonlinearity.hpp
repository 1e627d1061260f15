#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>

namespace frontforge {

enum class ReactionClass { Bistable, Ignition, Monostable };

std::string to_string(ReactionClass cls);

// u (1 - u) (u - theta)
struct CubicBistable {
  double theta = 0.3;
};

// scale (u - theta)^exponent (1 - u) on (theta, 1], zero below theta.
struct IgnitionReaction {
  double theta = 0.3;
  double exponent = 2.0;
  double scale = 1.0;
};

// sign(u) |u|^beta (1 - u); beta = 1 is the KPP logistic term.
struct AlleeMonostable {
  double beta = 2.0;
};

struct CustomReaction {
  std::function<double(double)> f;
  std::function<double(double)> df;
  ReactionClass cls = ReactionClass::Bistable;
  std::optional<double> theta;
};

struct ReactionValue {
  double value = 0.0;
  double derivative = 0.0;
};

struct Classification {
  ReactionClass cls = ReactionClass::Bistable;
  std::optional<double> theta;
  bool well_balanced = false;
  double slope_at_zero = 0.0;
  double integral = 0.0;
};

class Nonlinearity;

struct ShiftResult;

// Reaction term with an optional linear shift f(s) - tau s and smooth cutoff f chi(n s).
class Nonlinearity {
 public:
  using Kind = std::variant<CubicBistable, IgnitionReaction, AlleeMonostable, CustomReaction>;

  static Nonlinearity cubic(double theta);
  static Nonlinearity ignition(double theta, double exponent = 2.0, double scale = 1.0);
  static Nonlinearity allee(double beta);
  static Nonlinearity custom(std::function<double(double)> f, std::function<double(double)> df,
                             ReactionClass cls, std::optional<double> theta = std::nullopt);

  const Kind& kind() const { return kind_; }
  double linear_shift() const { return shift_; }
  std::optional<int> cutoff_index() const { return cutoff_; }

  // Declared class after modifiers (a cutoff turns a monostable term into an ignition one).
  ReactionClass declared_class() const;
  std::optional<double> threshold() const;
  std::optional<double> beta() const;

  ReactionValue evaluate(double s) const;
  // Same formula without the band check; used inside solver iterations.
  ReactionValue evaluate_unchecked(double s) const;
  double value(double s) const { return evaluate_unchecked(s).value; }

  double definite_integral(double a, double b) const;
  Classification classify() const;
  ShiftResult shift_by_tail_mass(double tau) const;
  Nonlinearity ignition_cutoff(int n) const;
  Nonlinearity with_shift(double tau) const;
  // g(u) = -f(1 - u); its fronts are (-c, 1 - u(-x)).
  Nonlinearity mirrored() const;
  // Sup norms of f and f' over [0, 1] by dense sampling.
  double sup_norm() const;
  double sup_norm_derivative() const;

 private:
  explicit Nonlinearity(Kind kind) : kind_(std::move(kind)) {}
  ReactionValue base(double s) const;

  Kind kind_;
  double shift_ = 0.0;
  std::optional<int> cutoff_;
};

struct ShiftResult {
  Nonlinearity shifted;
  std::optional<double> largest_root;
  std::optional<double> integral_to_root;
};

// Quintic smoothstep: 0 below 0, 1 above 1, C^2 at both joints.
double smoothstep(double t);
double smoothstep_derivative(double t);
double smoothstep_second_derivative(double t);

// chi(xi) = smoothstep(|xi| - 1): zero for |xi| <= 1, one for |xi| >= 2.
double cutoff_chi(double xi);
double cutoff_chi_derivative(double xi);

ReactionValue evaluate(const Nonlinearity& nl, double s);
double definite_integral(const Nonlinearity& nl, double a, double b);
Classification classify(const Nonlinearity& nl);
ShiftResult shift_by_tail_mass(const Nonlinearity& nl, double tau);
Nonlinearity ignition_cutoff(const Nonlinearity& nl, int n);

}  // namespace frontforge
