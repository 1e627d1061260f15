#pragma once

#include <optional>
#include <string>
#include <vector>

#include "frontforge/grid.hpp"
#include "frontforge/measure.hpp"
#include "frontforge/nonlinearity.hpp"
#include "frontforge/nonlocal_operator.hpp"

namespace frontforge {

// Checks attached to a solved front; absent entries do not apply to the problem.
struct DiagnosticsRecord {
  std::optional<double> identity1;
  std::optional<double> identity2;
  std::optional<double> identity3;
  std::optional<double> identity4;
  std::optional<double> sigma0;
  std::optional<double> cbar;
  std::optional<double> clow;
  std::optional<double> decay_rate_fit;
  std::optional<double> decay_rate_theory;
  std::optional<bool> w_convex;
  std::optional<double> ign_identity;
};

enum class SolveStatus { Converged, NoConvergence, MonotonicityLost };

std::string to_string(SolveStatus status);

struct FrontSolution {
  double speed = 0.0;
  Profile profile;
  double residual_norm = 0.0;
  int iterations = 0;
  SolveStatus status = SolveStatus::NoConvergence;
  double epsilon = 0.0;  // truncation of the measure the front was solved with
  DiagnosticsRecord diagnostics;

  bool converged() const { return status == SolveStatus::Converged; }
};

struct NewtonOptions {
  std::optional<double> phase_level;  // default: threshold for Bi/Ig, 1/2 for Mo
  double tol = 1e-10;
  int max_iter = 50;
  bool damping = true;
  int max_halvings = 20;
  double epsilon = 0.0;  // small-jump truncation applied to the measure
  double left_state = 1.0;
  double right_state = 0.0;
  std::optional<double> width;  // initial logistic width (default L/10)
  double monotonicity_tol = 1e-9;
};

// Logistic ramp from left_state to right_state; `width` is the 10%-90% distance.
Profile initial_guess(const Grid& g, double level, std::optional<double> width = std::nullopt,
                      double left_state = 1.0, double right_state = 0.0);

// Entries 0..N-1: D u + c (upwind difference) + f(u); entry N: u(0) - phase_level.
std::vector<double> residual(double c, const Profile& p, const Measure& m, const Nonlinearity& nl,
                             double phase_level, double delta = 0.0);
std::vector<double> residual(double c, const Profile& p, const DiscreteOperator& op,
                             const Nonlinearity& nl, double phase_level);

double default_phase_level(const Nonlinearity& nl);

FrontSolution newton_solve(const Measure& m, const Nonlinearity& nl, const Grid& g,
                           const NewtonOptions& options = {});
// Warm start from a given profile and speed (profile states set the far field).
FrontSolution newton_solve_from(const Measure& m, const Nonlinearity& nl, const Profile& guess,
                                double speed_guess, const NewtonOptions& options = {});
FrontSolution newton_solve_from(const DiscreteOperator& op, const Nonlinearity& nl,
                                const Profile& guess, double speed_guess,
                                const NewtonOptions& options);

// Front of g(u) = -f(1-u) built from a front of f: (-c, 1 - u(-x)).
FrontSolution mirror_front(const FrontSolution& sol);

struct ContinuationSchedule {
  double eps0 = 0.5;
  double factor = 0.5;
  std::optional<double> floor;  // default: see default_epsilon_floor
};

double default_epsilon_floor(const Grid& g);

struct ContinuationReport {
  std::vector<double> schedule;
  std::vector<FrontSolution> stages;
  std::vector<double> speeds;
  bool converged = false;  // final two speeds within 1e-6
  std::optional<double> extrapolated;
  std::optional<int> failed_stage;
  std::optional<std::string> warning;
};

inline constexpr const char* kNonexistenceWarning = "theory predicts nonexistence";

// Stamp for regimes where the continuum front is known not to exist.
std::optional<std::string> nonexistence_warning(const Measure& m, const Nonlinearity& nl);

ContinuationReport continue_in_epsilon(const Measure& m, const Nonlinearity& nl, const Grid& g,
                                       const ContinuationSchedule& schedule = {},
                                       const NewtonOptions& options = {});

struct Barrier {
  double kappa = 0.0;
  Profile w;
};

struct BarrierCheck {
  double max_residual = 0.0;  // max over nodes of D w + kappa w' + f(w)
  bool strictly_negative = false;
  bool speed_below_kappa = false;
};

struct LadderViolation {
  int n_prev = 0;
  int n_next = 0;
  double c_prev = 0.0;
  double c_next = 0.0;
};

struct MonostableReport {
  std::vector<int> ladder;
  std::vector<double> speeds;
  std::vector<FrontSolution> fronts;
  double c_star = 0.0;
  bool pulled = false;  // f'(0) > 0: logarithmic approach of the ladder
  std::optional<LadderViolation> violation;
  std::optional<BarrierCheck> barrier;
};

MonostableReport monostable_speed(const Measure& m, const Nonlinearity& nl, const Grid& g,
                                  const std::vector<int>& ladder,
                                  const std::optional<Barrier>& barrier = std::nullopt,
                                  const NewtonOptions& options = {});

// D w + kappa w' + f(w) at every node (upwind difference oriented by kappa).
std::vector<double> barrier_residual(const DiscreteOperator& op, const Nonlinearity& nl,
                                     const Barrier& b);

// Barrier from the front (kappa_g, w) of g = (1 + boost) f, with kappa = kappa_g (1 + margin).
Barrier build_barrier(const Measure& m, const Nonlinearity& nl, const Grid& g, double boost = 0.5,
                      double margin = 1e-3, const NewtonOptions& options = {},
                      const std::optional<FrontSolution>& warm = std::nullopt);

}  // namespace frontforge
