#pragma once

#include <optional>
#include <string>
#include <vector>

#include "frontforge/grid.hpp"
#include "frontforge/measure.hpp"
#include "frontforge/nonlinearity.hpp"
#include "frontforge/nonlocal_operator.hpp"

namespace frontforge {

struct Trajectory {
  std::vector<double> times;
  std::vector<Profile> states;     // empty unless states were kept
  double level = 0.5;
  std::vector<double> positions;   // NaN where the level is not attained
  std::vector<double> reaction;    // h dt-accumulated sum of f(U) up to each sample
  double dt = 0.0;
  double origin = 0.0;             // level position of the initial data (0 if not attained)
  bool left_window = false;        // stopped early at the window
};

struct EvolveOptions {
  double horizon = 1.0;
  std::optional<double> dt;         // default: the stability gate
  double level = 0.5;
  int samples = 200;                // recorded times, evenly spaced over the horizon
  bool keep_states = true;
  double delta = 0.0;               // small-jump truncation of the measure
  std::optional<double> window;     // WindowExceeded once x_level passes this position
  bool stop_at_window = false;      // end the trajectory there instead of throwing
};

// 0.4 / (|diagonal of D_h| + |f'|_inf); the diagonal is the discrete truncated mass.
double stable_time_step(const DiscreteOperator& op, const Nonlinearity& nl);

// Explicit Heun march of U_t = D[U] + f(U) with the far-field states of u0 held fixed.
Trajectory evolve(const Profile& u0, const Measure& m, const Nonlinearity& nl,
                  const EvolveOptions& options);
Trajectory evolve(const Profile& u0, const DiscreteOperator& op, const Nonlinearity& nl,
                  const EvolveOptions& options);

// Rightmost crossing of `level`, linearly interpolated between bracketing nodes.
double level_position(const Profile& state, double level);

// Linear ramp over three nodes from left to right around x0.
Profile heaviside_ramp(const Grid& g, double x0, double left = 1.0, double right = 0.0);

enum class Regime { Front, Algebraic, Exponential, Undecided };

std::string to_string(Regime r);

struct RegimeVerdict {
  Regime tag = Regime::Undecided;
  double value = 0.0;  // speed, exponent or rate depending on the tag
  double r2 = 0.0;     // quality of the fit behind the tag
  double loglog_slope = 0.0;
  double r2_linear = 0.0;
  double r2_loglog = 0.0;
  double r2_semilog = 0.0;
  int samples = 0;
};

// Fits x - origin against t after discarding the first burn_in fraction of the horizon.
RegimeVerdict classify_spreading(const Trajectory& tr, double burn_in = 0.3);

struct RegimePrediction {
  Regime tag = Regime::Undecided;
  std::optional<double> exponent;
};

// Weak Allee term u^beta (1 - u) under a fractional kernel of order s (beta = 1 is KPP).
RegimePrediction regime_prediction(double s, double beta);
// Bistable term under a fractional kernel of order s.
RegimePrediction bistable_regime_prediction(double s);

struct ComparisonAudit {
  bool ordered = true;
  double max_violation = 0.0;
  std::optional<double> first_violation_time;
  std::optional<double> first_violation_x;
};

// sub <= super + 1e-9 at every common sample.
ComparisonAudit parabolic_comparison_audit(const Trajectory& sub, const Trajectory& super,
                                           double tolerance = 1e-9);

}  // namespace frontforge
