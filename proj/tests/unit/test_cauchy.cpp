#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "frontforge/cauchy.hpp"
#include "frontforge/error.hpp"
#include "frontforge/tw_solver.hpp"
#include "oracles.hpp"

using namespace frontforge;
using doctest::Approx;

namespace {

const Measure kUniform = Measure::uniform(1.0);
const Nonlinearity kCubic = Nonlinearity::cubic(0.3);

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::BadParameters;
}

Trajectory synthetic(const std::function<double(double)>& x, double horizon, int n, double noise) {
  std::mt19937 rng(2024);
  std::normal_distribution<double> eta(0.0, noise);
  Trajectory tr;
  for (int i = 0; i <= n; ++i) {
    const double t = horizon * i / n;
    tr.times.push_back(t);
    tr.positions.push_back(x(t) + (noise > 0 ? eta(rng) : 0.0));
  }
  return tr;
}

}  // namespace

TEST_CASE("equilibria stay put") {
  const Grid g(20.0, 401);
  EvolveOptions opts;
  opts.horizon = 5.0;
  opts.samples = 20;
  for (double a : {1.0, 0.3, 0.0}) {
    const Profile u0(g, std::vector<double>(401, a), a, a);
    const Trajectory tr = evolve(u0, kUniform, kCubic, opts);
    for (const Profile& s : tr.states)
      for (int i = 0; i < 401; ++i) CHECK(std::abs(s[i] - a) <= 1e-14);
  }
}

TEST_CASE("a solved front translates at its speed") {
  const Grid g(40.0, 1601);
  const FrontSolution sol = newton_solve(kUniform, kCubic, g);
  REQUIRE(sol.converged());
  EvolveOptions opts;
  opts.horizon = 5.0;
  opts.samples = 10;
  const Trajectory tr = evolve(sol.profile, kUniform, kCubic, opts);
  const Profile& last = tr.states.back();
  double err = 0.0;
  for (int i = 0; i < g.nodes(); ++i)
    err = std::max(err, std::abs(last[i] - sol.profile.interpolate(g.x(i) - sol.speed * 5.0)));
  MESSAGE("transport error " << err);
  CHECK(err <= 5e-3);
  for (std::size_t k = 1; k < tr.times.size(); ++k) {
    CHECK(tr.times[k] > tr.times[k - 1]);
    CHECK(tr.positions[k] >= tr.positions[k - 1]);
  }
}

TEST_CASE("level position") {
  const Grid g(10.0, 201);
  std::vector<double> v;
  for (double x : g.coordinates()) v.push_back(x < 2.0 ? 1.0 : (x > 3.0 ? 0.0 : 3.0 - x));
  const Profile p(g, v, 1.0, 0.0);
  CHECK(level_position(p, 0.5) == Approx(2.5).epsilon(1e-12));
  CHECK(level_position(p, 0.25) == Approx(2.75).epsilon(1e-12));
  CHECK(code_of([&] { (void)level_position(p, 1.5); }) == ErrorCode::LevelNotAttained);

  const Profile r = heaviside_ramp(g, -4.0);
  CHECK(level_position(r, 0.5) == Approx(-4.0).epsilon(1e-12));
}

TEST_CASE("classification of synthetic spreading laws") {
  const RegimeVerdict lin = classify_spreading(synthetic([](double t) { return 3.0 * t; }, 100.0, 400, 1e-3));
  CHECK(lin.tag == Regime::Front);
  CHECK(lin.value == Approx(3.0).epsilon(0.01 / 3.0));
  CHECK(lin.loglog_slope >= 0.9);
  CHECK(lin.loglog_slope <= 1.1);
  CHECK(lin.r2_linear >= 0.99);

  const RegimeVerdict alg = classify_spreading(synthetic([](double t) { return std::pow(t, 2.0); }, 100.0, 400, 0.0));
  CHECK(alg.tag == Regime::Algebraic);
  CHECK(alg.value == Approx(2.0).epsilon(1e-6));

  const RegimeVerdict ex = classify_spreading(synthetic([](double t) { return std::exp(0.5 * t); }, 40.0, 400, 0.0));
  CHECK(ex.tag == Regime::Exponential);
  CHECK(ex.value == Approx(0.5).epsilon(1e-3));

  CHECK(code_of([] { (void)classify_spreading(synthetic([](double t) { return t; }, 1.0, 10, 0.0)); }) ==
        ErrorCode::TooFewSamples);
  CHECK(to_string(Regime::Front) == "FRONT");
  CHECK(to_string(Regime::Algebraic) == "ALGEBRAIC");
}

TEST_CASE("regime predictions") {
  CHECK(regime_prediction(0.75, 4.0).tag == Regime::Front);
  const RegimePrediction a = regime_prediction(0.75, 2.0);
  CHECK(a.tag == Regime::Algebraic);
  CHECK(*a.exponent == Approx(4.0 / 3.0));
  CHECK(regime_prediction(0.9, 1.0).tag == Regime::Exponential);
  CHECK(*regime_prediction(0.25, 2.0).exponent == Approx(4.0));
  CHECK(*regime_prediction(0.25, 4.0).exponent == Approx(8.0 / 3.0));
  // boundary curve beta = 2s / (2s - 1) belongs to the front side
  CHECK(regime_prediction(0.75, 3.0).tag == Regime::Front);
  CHECK(bistable_regime_prediction(0.75).tag == Regime::Front);
  CHECK(*bistable_regime_prediction(0.25).exponent == Approx(2.0));
  CHECK(code_of([] { (void)regime_prediction(1.0, 2.0); }) == ErrorCode::BadParameters);
  CHECK(code_of([] { (void)regime_prediction(0.5, 0.5); }) == ErrorCode::BadParameters);
}

TEST_CASE("ordered data stay ordered") {
  const Grid g(30.0, 601);
  EvolveOptions opts;
  opts.horizon = 10.0;
  opts.samples = 50;
  const Trajectory sub = evolve(heaviside_ramp(g, -5.0), kUniform, kCubic, opts);
  const Trajectory super = evolve(heaviside_ramp(g, 0.0), kUniform, kCubic, opts);
  const ComparisonAudit a = parabolic_comparison_audit(sub, super);
  CHECK(a.ordered);
  CHECK_FALSE(a.first_violation_time);
  const ComparisonAudit same = parabolic_comparison_audit(sub, sub);
  CHECK(same.ordered);
  CHECK(same.max_violation == 0.0);
  // reversed roles are caught
  const ComparisonAudit rev = parabolic_comparison_audit(super, sub);
  CHECK_FALSE(rev.ordered);
  CHECK(rev.first_violation_time);
}

TEST_CASE("mass balance for a compact perturbation") {
  const Grid g(20.0, 801);
  std::vector<double> v;
  for (double x : g.coordinates()) v.push_back(0.4 * oracle::bump(x / 3.0));
  const Profile u0(g, v, 0.0, 0.0);
  EvolveOptions opts;
  opts.horizon = 3.0;
  opts.samples = 30;
  const Trajectory tr = evolve(u0, kUniform, kCubic, opts);
  const double h = g.spacing();
  double m0 = 0.0;
  for (double x : v) m0 += x * h;
  for (std::size_t k = 0; k < tr.states.size(); ++k) {
    double mk = 0.0;
    for (double x : tr.states[k].values) mk += x * h;
    CHECK(std::abs((mk - m0) - tr.reaction[k]) <= 1e-6);
  }
}

TEST_CASE("time-step gate and input checks") {
  const Grid g(20.0, 401);
  const DiscreteOperator op(kUniform, g);
  const double gate = stable_time_step(op, kCubic);
  CHECK(gate == Approx(0.4 / (std::abs(op.diagonal()) + kCubic.sup_norm_derivative())));
  EvolveOptions opts;
  opts.horizon = 1.0;
  opts.dt = 2.0 * gate;
  CHECK(code_of([&] { (void)evolve(heaviside_ramp(g, 0.0), kUniform, kCubic, opts); }) ==
        ErrorCode::StabilityViolation);
  opts.dt.reset();
  const Profile bad(g, std::vector<double>(401, 1.2), 1.2, 1.2);
  CHECK(code_of([&] { (void)evolve(bad, kUniform, kCubic, opts); }) == ErrorCode::BadParameters);
}

TEST_CASE("window exit") {
  const Grid g(30.0, 601);
  EvolveOptions opts;
  opts.horizon = 200.0;
  opts.samples = 100;
  opts.window = 5.0;
  opts.keep_states = false;
  CHECK(code_of([&] { (void)evolve(heaviside_ramp(g, 0.0), kUniform, Nonlinearity::cubic(0.1), opts); }) ==
        ErrorCode::WindowExceeded);
  opts.stop_at_window = true;
  const Trajectory tr = evolve(heaviside_ramp(g, 0.0), kUniform, Nonlinearity::cubic(0.1), opts);
  CHECK(tr.left_window);
  CHECK(tr.times.back() < 200.0);
  CHECK(tr.states.empty());
}
