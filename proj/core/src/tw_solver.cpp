#include "frontforge/tw_solver.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>

#include "frontforge/error.hpp"

namespace frontforge {

namespace {

double sup_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return std::isfinite(m) ? m : kInfinity;
}

// Upwind first difference oriented by the sign of c.
double upwind(const Profile& p, int i, double c) {
  const double h = p.grid.spacing();
  if (c >= 0.0) return (p.extended(i + 1) - p.extended(i)) / h;
  return (p.extended(i) - p.extended(i - 1)) / h;
}

bool monotone_nonincreasing(const std::vector<double>& u, double tol) {
  for (std::size_t i = 1; i < u.size(); ++i)
    if (u[i] - u[i - 1] > tol) return false;
  return true;
}

}  // namespace

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::NoConvergence: return "no_convergence";
    case SolveStatus::MonotonicityLost: return "monotonicity_lost";
  }
  return "unknown";
}

Profile initial_guess(const Grid& g, double level, std::optional<double> width, double left_state,
                      double right_state) {
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorCode::BadParameters, "level must lie in (0,1)");
  const double w = width.value_or(g.half_length() / 10.0);
  if (!(w > 0.0)) throw Error(ErrorCode::BadParameters, "width must be positive");
  // 1 / (1 + exp(x / sigma)) rises from 10% to 90% over 2 ln 9 sigma.
  const double sigma = w / (2.0 * std::log(9.0));
  const double shift = -sigma * std::log(1.0 / level - 1.0);
  std::vector<double> v(static_cast<std::size_t>(g.nodes()));
  for (int i = 0; i < g.nodes(); ++i) {
    const double logistic = 1.0 / (1.0 + std::exp((g.x(i) - shift) / sigma));
    v[static_cast<std::size_t>(i)] = right_state + (left_state - right_state) * logistic;
  }
  return Profile(g, std::move(v), left_state, right_state);
}

double default_phase_level(const Nonlinearity& nl) {
  if (nl.declared_class() == ReactionClass::Monostable) return 0.5;
  return nl.threshold().value_or(0.5);
}

std::vector<double> residual(double c, const Profile& p, const DiscreteOperator& op,
                             const Nonlinearity& nl, double phase_level) {
  const int n = p.grid.nodes();
  std::vector<double> r(static_cast<std::size_t>(n) + 1);
  op.apply(p.values.data(), p.left_state, p.right_state, r.data());
  for (int i = 0; i < n; ++i)
    r[static_cast<std::size_t>(i)] += c * upwind(p, i, c) + nl.value(p[i]);
  r[static_cast<std::size_t>(n)] = p.at_center() - phase_level;
  return r;
}

std::vector<double> residual(double c, const Profile& p, const Measure& m, const Nonlinearity& nl,
                             double phase_level, double delta) {
  return residual(c, p, DiscreteOperator(m, p.grid, delta), nl, phase_level);
}

FrontSolution newton_solve_from(const DiscreteOperator& op, const Nonlinearity& nl,
                                const Profile& guess, double speed_guess,
                                const NewtonOptions& options) {
  const Grid& g = guess.grid;
  const int n = g.nodes();
  const double h = g.spacing();
  const double level = options.phase_level.value_or(default_phase_level(nl));

  Profile u = guess;
  double c = speed_guess;
  std::vector<double> r = residual(c, u, op, nl, level);
  double norm = sup_norm(r);

  Profile best = u;
  double best_c = c;
  double best_norm = norm;

  Eigen::MatrixXd jac(n + 1, n + 1);
  Eigen::VectorXd rhs(n + 1);
  int it = 0;
  for (; it < options.max_iter && norm > options.tol; ++it) {
    jac.setZero();
    op.add_to(jac.topLeftCorner(n, n));
    for (int i = 0; i < n; ++i) {
      jac(i, i) += nl.evaluate_unchecked(u[i]).derivative;
      if (c >= 0.0) {
        jac(i, i) -= c / h;
        if (i + 1 < n) jac(i, i + 1) += c / h;
      } else {
        jac(i, i) += c / h;
        if (i > 0) jac(i, i - 1) -= c / h;
      }
      jac(i, n) = upwind(u, i, c);
    }
    jac(n, g.center()) = 1.0;
    for (int i = 0; i <= n; ++i) rhs[i] = r[static_cast<std::size_t>(i)];

    const Eigen::VectorXd step = jac.partialPivLu().solve(rhs);
    if (!step.allFinite()) break;

    double lambda = 1.0;
    bool accepted = false;
    Profile trial = u;
    double trial_c = c;
    std::vector<double> trial_r;
    double trial_norm = kInfinity;
    const int halvings = options.damping ? options.max_halvings : 0;
    for (int k = 0; k <= halvings; ++k) {
      for (int i = 0; i < n; ++i)
        trial.values[static_cast<std::size_t>(i)] = u[i] - lambda * step[i];
      trial_c = c - lambda * step[n];
      trial_r = residual(trial_c, trial, op, nl, level);
      trial_norm = sup_norm(trial_r);
      if (trial_norm < norm || !options.damping) {
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) break;
    u = std::move(trial);
    c = trial_c;
    r = std::move(trial_r);
    norm = trial_norm;
    if (norm < best_norm) {
      best = u;
      best_c = c;
      best_norm = norm;
    }
  }

  FrontSolution sol{best_c, best, best_norm, it, SolveStatus::NoConvergence, 0.0, {}};
  if (best_norm <= options.tol) {
    sol.status = monotone_nonincreasing(best.values, options.monotonicity_tol)
                     ? SolveStatus::Converged
                     : SolveStatus::MonotonicityLost;
  }
  return sol;
}

FrontSolution newton_solve_from(const Measure& m, const Nonlinearity& nl, const Profile& guess,
                                double speed_guess, const NewtonOptions& options) {
  const DiscreteOperator op(m, guess.grid, options.epsilon);
  FrontSolution sol = newton_solve_from(op, nl, guess, speed_guess, options);
  sol.epsilon = std::max(options.epsilon, m.epsilon());
  return sol;
}

FrontSolution newton_solve(const Measure& m, const Nonlinearity& nl, const Grid& g,
                           const NewtonOptions& options) {
  const double level = options.phase_level.value_or(default_phase_level(nl));
  const double top = options.left_state;
  const double bottom = options.right_state;
  const double rel_level = (level - bottom) / (top - bottom);
  const Profile guess = initial_guess(g, std::clamp(rel_level, 1e-3, 1.0 - 1e-3), options.width,
                                      top, bottom);
  // Energy estimate c |u'|^2 = int f with |u'|^2 = (top - bottom)^2 / (6 sigma) for the logistic.
  const double width = options.width.value_or(g.half_length() / 10.0);
  const double sigma = width / (2.0 * std::log(9.0));
  const double lo = std::clamp(std::min(top, bottom), 0.0, 1.0);
  const double hi = std::clamp(std::max(top, bottom), 0.0, 1.0);
  const double drive = nl.definite_integral(lo, hi) * (top >= bottom ? 1.0 : -1.0);
  const double c0 = drive * 6.0 * sigma / ((top - bottom) * (top - bottom));
  return newton_solve_from(m, nl, guess, c0, options);
}

FrontSolution mirror_front(const FrontSolution& sol) {
  const Profile& p = sol.profile;
  const int n = p.grid.nodes();
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = 1.0 - p[n - 1 - i];
  FrontSolution out = sol;
  out.speed = -sol.speed;
  out.profile = Profile(p.grid, std::move(v), 1.0 - p.right_state, 1.0 - p.left_state);
  out.diagnostics = {};
  return out;
}

double default_epsilon_floor(const Grid& g) { return 1e-12 * g.half_length(); }

std::optional<std::string> nonexistence_warning(const Measure& m, const Nonlinearity& nl) {
  const auto s = m.fractional_exponent();
  switch (nl.declared_class()) {
    case ReactionClass::Ignition:
      if (!m.moments().m_first) return std::string(kNonexistenceWarning);
      break;
    case ReactionClass::Monostable:
      if (s && nl.beta() && (2.0 * *s - 1.0) * (*nl.beta() - 1.0) < 1.0 && !m.bounded_support())
        return std::string(kNonexistenceWarning);
      break;
    case ReactionClass::Bistable:
      break;
  }
  return std::nullopt;
}

ContinuationReport continue_in_epsilon(const Measure& m, const Nonlinearity& nl, const Grid& g,
                                       const ContinuationSchedule& schedule,
                                       const NewtonOptions& options) {
  if (!(schedule.eps0 > 0.0) || !(schedule.factor > 0.0 && schedule.factor < 1.0))
    throw Error(ErrorCode::BadParameters, "schedule needs eps0 > 0 and factor in (0,1)");
  const double floor = schedule.floor.value_or(default_epsilon_floor(g));
  if (!(floor > 0.0) || floor > schedule.eps0)
    throw Error(ErrorCode::BadParameters, "floor must lie in (0, eps0]");

  ContinuationReport report;
  report.warning = nonexistence_warning(m, nl);
  for (double eps = schedule.eps0; eps > floor * (1.0 + 1e-12); eps *= schedule.factor)
    report.schedule.push_back(eps);
  report.schedule.push_back(floor);

  std::optional<FrontSolution> previous;
  for (std::size_t k = 0; k < report.schedule.size(); ++k) {
    NewtonOptions stage_options = options;
    stage_options.epsilon = report.schedule[k];
    FrontSolution sol =
        previous ? newton_solve_from(m, nl, previous->profile, previous->speed, stage_options)
                 : newton_solve(m.truncated(report.schedule[k]), nl, g, stage_options);
    sol.epsilon = report.schedule[k];
    if (!sol.converged()) {
      report.failed_stage = static_cast<int>(k);
      report.stages.push_back(std::move(sol));
      report.speeds.push_back(report.stages.back().speed);
      return report;
    }
    report.speeds.push_back(sol.speed);
    report.stages.push_back(sol);
    previous = std::move(sol);
  }

  const auto& c = report.speeds;
  const std::size_t k = c.size();
  report.extrapolated = c.back();
  if (k >= 2) report.converged = std::abs(c[k - 1] - c[k - 2]) <= 1e-6;
  if (k >= 3) {
    const double d1 = c[k - 2] - c[k - 3];
    const double d2 = c[k - 1] - c[k - 2];
    if (d1 != 0.0 && d2 / d1 > 0.0 && d2 / d1 < 1.0)
      report.extrapolated = c[k - 1] - d2 * d2 / (d2 - d1);
  }
  return report;
}

std::vector<double> barrier_residual(const DiscreteOperator& op, const Nonlinearity& nl,
                                     const Barrier& b) {
  std::vector<double> r = residual(b.kappa, b.w, op, nl, 0.0);
  r.pop_back();
  return r;
}

MonostableReport monostable_speed(const Measure& m, const Nonlinearity& nl, const Grid& g,
                                  const std::vector<int>& ladder,
                                  const std::optional<Barrier>& barrier,
                                  const NewtonOptions& options) {
  if (nl.declared_class() != ReactionClass::Monostable)
    throw Error(ErrorCode::WrongClass, "monostable ladder needs a monostable term");
  if (ladder.empty()) throw Error(ErrorCode::BadParameters, "empty cutoff ladder");
  for (std::size_t i = 1; i < ladder.size(); ++i)
    if (ladder[i] <= ladder[i - 1]) throw Error(ErrorCode::BadParameters, "ladder must increase");

  MonostableReport report;
  report.pulled = nl.evaluate(0.0).derivative > 0.0;
  NewtonOptions opts = options;
  if (!opts.phase_level) opts.phase_level = 0.5;
  const DiscreteOperator op(m, g, opts.epsilon);

  std::optional<FrontSolution> previous;
  for (int n : ladder) {
    const Nonlinearity fn = nl.ignition_cutoff(n);
    FrontSolution sol = [&] {
      if (previous) return newton_solve_from(op, fn, previous->profile, previous->speed, opts);
      return newton_solve(opts.epsilon > 0.0 ? m.truncated(opts.epsilon) : m, fn, g, opts);
    }();
    sol.epsilon = opts.epsilon;
    if (!sol.converged())
      throw Error(ErrorCode::NoConvergence,
                  "cutoff front n=" + std::to_string(n) + " status " + to_string(sol.status));
    report.ladder.push_back(n);
    report.speeds.push_back(sol.speed);
    report.fronts.push_back(sol);
    previous = std::move(sol);
  }

  const auto& c = report.speeds;
  const auto& ns = report.ladder;
  for (std::size_t i = 1; i < c.size(); ++i)
    if (c[i] < c[i - 1] - 1e-8 && !report.violation)
      report.violation = LadderViolation{ns[i - 1], ns[i], c[i - 1], c[i]};

  const std::size_t k = c.size();
  report.c_star = c.back();
  if (report.pulled && k >= 2) {
    // c_n ~ c_* - A / ln(n)^2 for pulled fronts.
    const double l1 = std::pow(std::log(static_cast<double>(ns[k - 2])), 2);
    const double l2 = std::pow(std::log(static_cast<double>(ns[k - 1])), 2);
    report.c_star = std::max(c.back(), (c[k - 1] * l2 - c[k - 2] * l1) / (l2 - l1));
  } else if (!report.pulled && k >= 3) {
    const double d1 = c[k - 2] - c[k - 3];
    const double d2 = c[k - 1] - c[k - 2];
    if (d1 != 0.0 && d2 / d1 > 0.0 && d2 / d1 < 1.0)
      report.c_star = c[k - 1] - d2 * d2 / (d2 - d1);
  }

  if (barrier) {
    const std::vector<double> r = barrier_residual(op, nl, *barrier);
    BarrierCheck check;
    check.max_residual = *std::max_element(r.begin(), r.end());
    check.strictly_negative = check.max_residual < 0.0;
    check.speed_below_kappa = report.c_star <= barrier->kappa;
    report.barrier = check;
  }
  return report;
}

Barrier build_barrier(const Measure& m, const Nonlinearity& nl, const Grid& g, double boost,
                      double margin, const NewtonOptions& options,
                      const std::optional<FrontSolution>& warm) {
  if (nl.declared_class() != ReactionClass::Monostable)
    throw Error(ErrorCode::WrongClass, "barrier construction needs a monostable term");
  if (!(boost > 0.0) || !(margin > 0.0))
    throw Error(ErrorCode::BadParameters, "boost and margin must be positive");
  const double scale = 1.0 + boost;
  const Nonlinearity boosted = Nonlinearity::custom(
      [nl, scale](double u) { return scale * nl.value(u); },
      [nl, scale](double u) { return scale * nl.evaluate_unchecked(u).derivative; },
      ReactionClass::Monostable);
  NewtonOptions opts = options;
  if (!opts.phase_level) opts.phase_level = 0.5;
  const DiscreteOperator op(m, g, opts.epsilon);
  FrontSolution sol = warm ? newton_solve_from(op, boosted, warm->profile, warm->speed, opts)
                           : newton_solve(opts.epsilon > 0.0 ? m.truncated(opts.epsilon) : m,
                                          boosted, g, opts);
  if (!sol.converged())
    throw Error(ErrorCode::NoConvergence, "barrier front status " + to_string(sol.status));
  return Barrier{sol.speed * (1.0 + margin), sol.profile};
}

}  // namespace frontforge
