#include "frontforge/cauchy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "frontforge/error.hpp"

namespace frontforge {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kOvershoot = 1e-9;
constexpr int kFftReach = 64;

struct Fit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

Fit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  Fit f;
  f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return f;
}

double try_level(const Profile& p, double level) {
  try {
    return level_position(p, level);
  } catch (const Error&) {
    return kNaN;
  }
}

}  // namespace

std::string to_string(Regime r) {
  switch (r) {
    case Regime::Front: return "FRONT";
    case Regime::Algebraic: return "ALGEBRAIC";
    case Regime::Exponential: return "EXPONENTIAL";
    case Regime::Undecided: return "UNDECIDED";
  }
  return "UNDECIDED";
}

double stable_time_step(const DiscreteOperator& op, const Nonlinearity& nl) {
  return 0.4 / (std::abs(op.diagonal()) + nl.sup_norm_derivative());
}

Trajectory evolve(const Profile& u0, const Measure& m, const Nonlinearity& nl,
                  const EvolveOptions& options) {
  const DiscreteOperator op(m, u0.grid, options.delta);
  return evolve(u0, op, nl, options);
}

Trajectory evolve(const Profile& u0, const DiscreteOperator& op, const Nonlinearity& nl,
                  const EvolveOptions& options) {
  if (!(u0.grid == op.grid())) throw Error(ErrorCode::InvalidGrid, "initial data grid differs from operator grid");
  if (!(options.horizon >= 0.0) || options.samples < 1)
    throw Error(ErrorCode::BadParameters, "horizon must be >= 0 and samples >= 1");
  const double gate = stable_time_step(op, nl);
  if (options.dt && *options.dt > gate)
    throw Error(ErrorCode::StabilityViolation, "time step above the stability gate");

  const int n = u0.grid.nodes();
  const double h = u0.grid.spacing();
  const double left = u0.left_state;
  const double right = u0.right_state;
  for (double v : u0.values)
    if (v < -kOvershoot || v > 1.0 + kOvershoot)
      throw Error(ErrorCode::BadParameters, "initial data must lie in [0, 1]");

  Trajectory tr;
  tr.level = options.level;
  tr.origin = try_level(u0, options.level);
  if (std::isnan(tr.origin)) tr.origin = 0.0;

  std::vector<double> u = u0.values;
  std::vector<double> k1(static_cast<std::size_t>(n)), k2(static_cast<std::size_t>(n));
  std::vector<double> stage(static_cast<std::size_t>(n));
  double reaction = 0.0;

  // Direct sums cost N * reach per call; switch to FFT once the reach is long.
  std::optional<FftApply> fast;
  if (op.reach() > kFftReach) fast.emplace(op);
  auto rhs = [&](const std::vector<double>& state, std::vector<double>& out) {
    if (fast)
      (*fast)(state.data(), left, right, out.data());
    else
      op.apply(state.data(), left, right, out.data());
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double f = nl.value(state[static_cast<std::size_t>(i)]);
      out[static_cast<std::size_t>(i)] += f;
      sum += f;
    }
    return h * sum;
  };

  auto record = [&](double t) {
    Profile p(u0.grid, u, left, right);
    const double x = try_level(p, options.level);
    if (options.window && !std::isnan(x) && x > *options.window) {
      if (!options.stop_at_window)
        throw Error(ErrorCode::WindowExceeded, "level set left the computational window");
      tr.left_window = true;
      return false;
    }
    tr.times.push_back(t);
    tr.positions.push_back(x);
    tr.reaction.push_back(reaction);
    if (options.keep_states) tr.states.push_back(std::move(p));
    return true;
  };

  record(0.0);
  double t = 0.0;
  const double dt_max = options.dt.value_or(gate);
  tr.dt = dt_max;
  for (int s = 1; s <= options.samples; ++s) {
    const double target = options.horizon * s / options.samples;
    const int steps = static_cast<int>(std::ceil((target - t) / dt_max - 1e-12));
    if (steps > 0) {
      const double dt = (target - t) / steps;
      for (int step = 0; step < steps; ++step) {
        const double f1 = rhs(u, k1);
        for (int i = 0; i < n; ++i) {
          const auto j = static_cast<std::size_t>(i);
          stage[j] = u[j] + dt * k1[j];
        }
        const double f2 = rhs(stage, k2);
        double lo = 0.0, hi = 1.0;
        for (int i = 0; i < n; ++i) {
          const auto j = static_cast<std::size_t>(i);
          u[j] += 0.5 * dt * (k1[j] + k2[j]);
          lo = std::min(lo, u[j]);
          hi = std::max(hi, u[j]);
        }
        reaction += 0.5 * dt * (f1 + f2);
        if (lo < -kOvershoot || hi > 1.0 + kOvershoot)
          throw Error(ErrorCode::OvershootDetected, "state left [0, 1]");
      }
    }
    t = target;
    if (!record(t)) break;
  }
  return tr;
}

double level_position(const Profile& state, double level) {
  const int n = state.grid.nodes();
  for (int i = n - 1; i >= -1; --i) {
    const double a = state.extended(i);
    const double b = state.extended(i + 1);
    if ((a >= level && b < level) || (a < level && b >= level)) {
      const double xa = state.grid.x(0) + i * state.grid.spacing();
      if (a == b) return xa;
      return xa + (level - a) / (b - a) * state.grid.spacing();
    }
  }
  throw Error(ErrorCode::LevelNotAttained, "level is not crossed by the state");
}

Profile heaviside_ramp(const Grid& g, double x0, double left, double right) {
  const double h = g.spacing();
  std::vector<double> v(static_cast<std::size_t>(g.nodes()));
  for (int i = 0; i < g.nodes(); ++i) {
    const double t = std::clamp((g.x(i) - x0) / (2.0 * h) + 0.5, 0.0, 1.0);
    v[static_cast<std::size_t>(i)] = left + (right - left) * t;
  }
  return Profile(g, std::move(v), left, right);
}

RegimeVerdict classify_spreading(const Trajectory& tr, double burn_in) {
  if (tr.times.empty()) throw Error(ErrorCode::TooFewSamples, "empty trajectory");
  const double t_end = tr.times.back();
  std::vector<double> t, x, lt, lx;
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    if (tr.times[i] < burn_in * t_end || tr.times[i] <= 0.0) continue;
    const double d = tr.positions[i] - tr.origin;
    if (std::isnan(d) || d <= 0.0) continue;
    t.push_back(tr.times[i]);
    x.push_back(d);
    lt.push_back(std::log(tr.times[i]));
    lx.push_back(std::log(d));
  }
  RegimeVerdict v;
  v.samples = static_cast<int>(t.size());
  if (t.size() < 20) throw Error(ErrorCode::TooFewSamples, "need at least 20 samples after burn-in");

  const Fit linear = fit_line(t, x);
  const Fit loglog = fit_line(lt, lx);
  const Fit semilog = fit_line(t, lx);
  v.loglog_slope = loglog.slope;
  v.r2_linear = linear.r2;
  v.r2_loglog = loglog.r2;
  v.r2_semilog = semilog.r2;

  if (loglog.slope >= 0.9 && loglog.slope <= 1.1 && linear.r2 >= 0.99) {
    v.tag = Regime::Front;
    v.value = linear.slope;
    v.r2 = linear.r2;
  } else if (semilog.r2 > loglog.r2 && semilog.r2 >= 0.99 && loglog.slope > 1.1) {
    v.tag = Regime::Exponential;
    v.value = semilog.slope;
    v.r2 = semilog.r2;
  } else if (loglog.r2 >= 0.95) {
    v.tag = Regime::Algebraic;
    v.value = loglog.slope;
    v.r2 = loglog.r2;
  } else {
    v.tag = Regime::Undecided;
    v.value = loglog.slope;
    v.r2 = loglog.r2;
  }
  return v;
}

RegimePrediction regime_prediction(double s, double beta) {
  if (!(s > 0.0 && s < 1.0) || !(beta >= 1.0))
    throw Error(ErrorCode::BadParameters, "need s in (0, 1) and beta >= 1");
  if (beta == 1.0) return {Regime::Exponential, std::nullopt};
  if ((2.0 * s - 1.0) * (beta - 1.0) >= 1.0) return {Regime::Front, std::nullopt};
  return {Regime::Algebraic, beta / (2.0 * s * (beta - 1.0))};
}

RegimePrediction bistable_regime_prediction(double s) {
  if (!(s > 0.0 && s < 1.0)) throw Error(ErrorCode::BadParameters, "need s in (0, 1)");
  if (s > 0.5) return {Regime::Front, std::nullopt};
  return {Regime::Algebraic, 1.0 / (2.0 * s)};
}

ComparisonAudit parabolic_comparison_audit(const Trajectory& sub, const Trajectory& super,
                                           double tolerance) {
  if (sub.times != super.times || sub.states.size() != super.states.size())
    throw Error(ErrorCode::BadParameters, "trajectories must share sample times and keep states");
  ComparisonAudit audit;
  for (std::size_t k = 0; k < sub.states.size(); ++k) {
    const Profile& a = sub.states[k];
    const Profile& b = super.states[k];
    if (!(a.grid == b.grid)) throw Error(ErrorCode::InvalidGrid, "trajectories use different grids");
    for (int i = 0; i < a.grid.nodes(); ++i) {
      const double gap = a[i] - b[i];
      audit.max_violation = std::max(audit.max_violation, gap);
      if (gap > tolerance && audit.ordered) {
        audit.ordered = false;
        audit.first_violation_time = sub.times[k];
        audit.first_violation_x = a.grid.x(i);
      }
    }
  }
  return audit;
}

}  // namespace frontforge
