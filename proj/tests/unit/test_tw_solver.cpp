#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "frontforge/error.hpp"
#include "frontforge/tw_solver.hpp"
#include "oracles.hpp"

using namespace frontforge;
using doctest::Approx;

namespace {

const Grid kGrid(40.0, 801);

bool monotone(const Profile& p, double tol = 1e-9) {
  for (int i = 1; i < p.size(); ++i)
    if (p[i] > p[i - 1] + tol) return false;
  return true;
}

double sup_diff(const Profile& a, const Profile& b) {
  double m = 0.0;
  for (int i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

Profile shifted(const Profile& p, int nodes) {
  std::vector<double> v(p.values.size());
  for (int i = 0; i < p.size(); ++i) v[static_cast<std::size_t>(i)] = p.extended(i - nodes);
  return Profile(p.grid, v, p.left_state, p.right_state);
}

}  // namespace

TEST_CASE("initial guess") {
  const Profile p = initial_guess(kGrid, 0.5);
  CHECK(p.at_center() == Approx(0.5).epsilon(1e-14));
  for (int i = 1; i < p.size(); ++i) {
    CHECK(p[i] <= p[i - 1]);
    if (p[i - 1] < 1.0 - 1e-12 && p[i] > 1e-12) CHECK(p[i] < p[i - 1]);  // strict until it saturates
  }
  const Profile q = initial_guess(kGrid, 0.3, 4.0);
  CHECK(q.at_center() == Approx(0.3).epsilon(1e-14));
  CHECK(q[0] > 1.0 - 1e-6);
  CHECK(q.left_state == 1.0);
  CHECK(q.right_state == 0.0);
  CHECK_THROWS_AS((void)initial_guess(kGrid, 1.0), Error);
}

TEST_CASE("residual structure") {
  const Measure m = Measure::uniform(1.0);
  const Nonlinearity f = Nonlinearity::cubic(0.3);
  const double alpha = 0.6;
  const Profile flat(kGrid, std::vector<double>(801, alpha), alpha, alpha);
  const std::vector<double> r = residual(0.0, flat, m, f, 0.3);
  REQUIRE(r.size() == 802);
  for (int i = 0; i < 801; ++i) CHECK(r[i] == Approx(f.value(alpha)).epsilon(1e-12));
  CHECK(r[801] == Approx(alpha - 0.3).epsilon(1e-14));

  const Profile p = initial_guess(kGrid, 0.3);
  const std::vector<double> r0 = residual(0.0, p, m, f, 0.3);
  const std::vector<double> r1 = residual(0.4, p, m, f, 0.3);
  const std::vector<double> r2 = residual(0.8, p, m, f, 0.3);
  for (int i = 0; i < 801; ++i) CHECK(r2[i] - r0[i] == Approx(2.0 * (r1[i] - r0[i])).epsilon(1e-10));
}

TEST_CASE("bistable front on the uniform kernel") {
  const Measure m = Measure::uniform(1.0);
  const FrontSolution sol = newton_solve(m, Nonlinearity::cubic(0.3), kGrid);
  REQUIRE(sol.converged());
  CHECK(sol.speed > 0.0);
  CHECK(sol.residual_norm <= 1e-10);
  CHECK(monotone(sol.profile));
  CHECK(sol.profile.at_center() == Approx(0.3).epsilon(1e-12));
  CHECK(default_phase_level(Nonlinearity::cubic(0.3)) == Approx(0.3));
  CHECK(default_phase_level(Nonlinearity::allee(2.0)) == 0.5);
  CHECK(default_phase_level(Nonlinearity::ignition(0.2)) == Approx(0.2));
  // the returned pair satisfies its own residual
  const std::vector<double> r = residual(sol.speed, sol.profile, m, Nonlinearity::cubic(0.3), 0.3);
  double sup = 0.0;
  for (double x : r) sup = std::max(sup, std::abs(x));
  CHECK(sup <= 1e-10);
}

TEST_CASE("well-balanced term gives a standing front") {
  const FrontSolution sol = newton_solve(Measure::uniform(1.0), Nonlinearity::cubic(0.5), kGrid);
  REQUIRE(sol.converged());
  CHECK(std::abs(sol.speed) <= 5e-3);
}

TEST_CASE("mirror construction") {
  const Measure m = Measure::uniform(1.0);
  const Nonlinearity f = Nonlinearity::cubic(0.3);
  const FrontSolution sol = newton_solve(m, f, kGrid);
  const FrontSolution mir = mirror_front(sol);
  CHECK(mir.speed == -sol.speed);
  for (int i = 0; i < kGrid.nodes(); ++i)
    CHECK(mir.profile[i] == Approx(1.0 - sol.profile[kGrid.nodes() - 1 - i]).epsilon(1e-15));

  // solving g directly lands on the mirrored pair
  const FrontSolution direct = newton_solve(m, f.mirrored(), kGrid);
  REQUIRE(direct.converged());
  CHECK(direct.speed < 0.0);
  CHECK(std::abs(direct.speed - mir.speed) <= 1e-6);
  CHECK(sup_diff(direct.profile, mir.profile) <= 1e-6);

  // theta > 1/2: negative integral, negative speed
  const FrontSolution neg = newton_solve(m, Nonlinearity::cubic(0.7), kGrid);
  REQUIRE(neg.converged());
  CHECK(neg.speed < 0.0);
}

TEST_CASE("translation gauge and uniqueness") {
  const Measure m = Measure::uniform(1.0);
  const Nonlinearity f = Nonlinearity::cubic(0.3);
  const FrontSolution a = newton_solve(m, f, kGrid);
  const FrontSolution b = newton_solve_from(m, f, shifted(a.profile, 7), a.speed * 0.8);
  REQUIRE(b.converged());
  CHECK(std::abs(a.speed - b.speed) <= 1e-9);
  CHECK(sup_diff(a.profile, b.profile) <= 1e-7);

  NewtonOptions wide, narrow;
  wide.width = kGrid.half_length() / 10.0;
  narrow.width = kGrid.half_length() / 30.0;
  const FrontSolution w = newton_solve(m, f, kGrid, wide);
  const FrontSolution n = newton_solve(m, f, kGrid, narrow);
  REQUIRE(w.converged());
  REQUIRE(n.converged());
  CHECK(std::abs(w.speed - n.speed) <= 1e-8);
}

TEST_CASE("grid robustness at fixed spacing") {
  const Measure m = Measure::uniform(1.0);
  const Nonlinearity f = Nonlinearity::cubic(0.3);
  const FrontSolution a = newton_solve(m, f, kGrid);
  const FrontSolution b = newton_solve(m, f, Grid(60.0, 1201));
  CHECK(std::abs(a.speed - b.speed) <= 1e-4 * std::abs(a.speed));
}

TEST_CASE("speed converges at first order or better") {
  const Measure m = Measure::uniform(1.0);
  const Nonlinearity f = Nonlinearity::cubic(0.3);
  std::vector<double> c;
  for (int n : {401, 801, 1601}) c.push_back(newton_solve(m, f, Grid(40.0, n)).speed);
  const double order = std::log2(std::abs(c[0] - c[1]) / std::abs(c[1] - c[2]));
  MESSAGE("observed order " << order);
  CHECK(order >= 0.8);
}

TEST_CASE("speed is monotone in the reaction term") {
  const Measure m = Measure::uniform(1.0);
  double prev = -1.0;
  for (double theta : {0.35, 0.3, 0.25, 0.2}) {
    const FrontSolution sol = newton_solve(m, Nonlinearity::cubic(theta), kGrid);
    REQUIRE(sol.converged());
    CHECK(sol.speed >= prev - 1e-8);
    prev = sol.speed;
  }
}

TEST_CASE("continuation for a fractional kernel") {
  const Measure m = Measure::fractional(0.75);
  ContinuationSchedule sched;
  sched.eps0 = 0.5;
  sched.floor = 0.5 / 256.0;
  const ContinuationReport rep = continue_in_epsilon(m, Nonlinearity::cubic(0.3), kGrid, sched);
  REQUIRE_FALSE(rep.failed_stage);
  REQUIRE(rep.speeds.size() == 9);
  for (std::size_t k = 1; k < rep.schedule.size(); ++k) CHECK(rep.schedule[k] < rep.schedule[k - 1]);
  for (std::size_t k = 2; k < rep.speeds.size(); ++k)
    CHECK(std::abs(rep.speeds[k] - rep.speeds[k - 1]) < std::abs(rep.speeds[k - 1] - rep.speeds[k - 2]));
  for (const FrontSolution& s : rep.stages) {
    CHECK(s.speed > 0.0);
    CHECK(monotone(s.profile));
  }
  CHECK_FALSE(rep.warning);
}

TEST_CASE("continuation is inert when truncation misses the support") {
  // J = 1 on 0.6 <= |z| <= 1: truncating below 0.6 removes nothing
  const Measure m = Measure::density([](double z) { return z >= 0.6 ? 1.0 : 0.0; }, 1.0);
  ContinuationSchedule sched;
  sched.eps0 = 0.5;
  sched.floor = 0.5 / 32.0;
  const ContinuationReport rep = continue_in_epsilon(m, Nonlinearity::cubic(0.3), kGrid, sched);
  REQUIRE_FALSE(rep.failed_stage);
  for (double c : rep.speeds) CHECK(std::abs(c - rep.speeds.front()) <= 1e-9);
  CHECK(rep.converged);
}

TEST_CASE("continuation schedule errors") {
  ContinuationSchedule bad;
  bad.factor = 1.5;
  CHECK_THROWS_AS((void)continue_in_epsilon(Measure::uniform(1.0), Nonlinearity::cubic(0.3), kGrid, bad), Error);
  bad.factor = 0.5;
  bad.floor = 1.0;
  CHECK_THROWS_AS((void)continue_in_epsilon(Measure::uniform(1.0), Nonlinearity::cubic(0.3), kGrid, bad), Error);
}

TEST_CASE("nonexistence stamp") {
  CHECK(nonexistence_warning(Measure::fractional(0.4), Nonlinearity::ignition(0.3)));
  CHECK_FALSE(nonexistence_warning(Measure::fractional(0.75), Nonlinearity::ignition(0.3)));
  CHECK(nonexistence_warning(Measure::fractional(0.75), Nonlinearity::allee(2.0)));
  CHECK_FALSE(nonexistence_warning(Measure::fractional(0.75), Nonlinearity::allee(4.0)));
  CHECK_FALSE(nonexistence_warning(Measure::fractional(0.25), Nonlinearity::cubic(0.3)));
}

TEST_CASE("monostable ladder on the uniform kernel") {
  const Measure m = Measure::uniform(1.0);
  const MonostableReport rep = monostable_speed(m, Nonlinearity::allee(2.0), kGrid, {4, 8, 16});
  CHECK_FALSE(rep.violation);
  CHECK_FALSE(rep.pulled);
  for (std::size_t i = 1; i < rep.speeds.size(); ++i) CHECK(rep.speeds[i] >= rep.speeds[i - 1] - 1e-8);
  CHECK(rep.c_star >= rep.speeds.back());
  for (const FrontSolution& s : rep.fronts) CHECK(s.profile.at_center() == Approx(0.5).epsilon(1e-12));

  CHECK_THROWS_AS((void)monostable_speed(m, Nonlinearity::cubic(0.3), kGrid, {4}), Error);
  CHECK_THROWS_AS((void)monostable_speed(m, Nonlinearity::allee(2.0), kGrid, {8, 4}), Error);
}

TEST_CASE("barrier bounds the ladder") {
  {
    // heavy tail keeps w below 1 on the grid, so the residual is negative everywhere
    const Measure m = Measure::fractional(0.9).truncated(kGrid.spacing() / 2.0);
    const Nonlinearity f = Nonlinearity::allee(3.0);
    const Barrier b = build_barrier(m, f, kGrid);
    const MonostableReport rep = monostable_speed(m, f, kGrid, {4, 8}, b);
    REQUIRE(rep.barrier);
    CHECK(rep.barrier->strictly_negative);
    CHECK(rep.barrier->speed_below_kappa);
  }
  {
    // compact kernel: w rounds to exactly 1 far left, where the residual is pure rounding
    const Measure m = Measure::uniform(1.0);
    const Nonlinearity f = Nonlinearity::allee(2.0);
    const Barrier b = build_barrier(m, f, kGrid);
    const MonostableReport rep = monostable_speed(m, f, kGrid, {4, 8, 16}, b);
    REQUIRE(rep.barrier);
    CHECK(rep.barrier->max_residual <= 1e-14);
    CHECK(rep.barrier->speed_below_kappa);
  }
}

TEST_CASE("iteration cap reports nonconvergence") {
  NewtonOptions opts;
  opts.max_iter = 1;
  const FrontSolution sol = newton_solve(Measure::uniform(1.0), Nonlinearity::cubic(0.3), kGrid, opts);
  CHECK(sol.status == SolveStatus::NoConvergence);
  CHECK_FALSE(sol.converged());
}
