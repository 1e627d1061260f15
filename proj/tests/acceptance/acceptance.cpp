// Acceptance run: one PASS/FAIL line per criterion, preceded by the individual
// checks and measured values. Exit status is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "frontforge/cauchy.hpp"
#include "frontforge/diagnostics.hpp"
#include "frontforge/error.hpp"
#include "frontforge/nonlocal_operator.hpp"
#include "frontforge/tw_solver.hpp"
#include "oracles.hpp"

using namespace frontforge;

namespace {

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

struct Report {
  bool ok = true;
  void check(bool cond, const std::string& what) {
    ok = ok && cond;
    std::printf("    %s %s\n", cond ? "ok  " : "MISS", what.c_str());
  }
  void note(const std::string& what) { std::printf("    info %s\n", what.c_str()); }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

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

const Nonlinearity kCubic = Nonlinearity::cubic(0.3);
const Measure kUniform = Measure::uniform(1.0);
const Measure kFrac = Measure::fractional(0.75);
const Grid kGrid(40.0, 1601);

// Shared fronts, computed once.
struct Fixtures {
  FrontSolution uniform;
  ContinuationReport fractional;
};

Fixtures& fixtures() {
  static Fixtures f = [] {
    Fixtures x{newton_solve(kUniform, kCubic, kGrid), {}};
    x.fractional = continue_in_epsilon(kFrac, kCubic, kGrid);
    return x;
  }();
  return f;
}

// ---------------------------------------------------------------------------

void operator_correctness(Report& r) {
  const Grid g(20.0, 401);
  const std::vector<Measure> ms{kUniform, Measure::fractional(0.25), kFrac,
                                Measure::fractional(0.6).restricted(3.0),
                                Measure::density([](double z) { return std::exp(-z); })};
  double worst_const = 0.0;
  for (const Measure& m : ms) {
    const Profile c(g, std::vector<double>(401, 0.7), 0.7, 0.7);
    for (double x : apply(m, c, 0.0)) worst_const = std::max(worst_const, std::abs(x));
  }
  r.check(worst_const <= 1e-12, fmt("constants annihilated: max |D c| = %.2e", worst_const));

  // quadratic window: D[x^2] = int z^2 dmu at nodes whose window stays inside the grid
  struct Q {
    Measure m;
    double radius;
    double second;
  };
  const std::vector<Q> qs{
      {kUniform, 1.0, oracle::adaptive_simpson([](double z) { return z * z; }, -1.0, 1.0)},
      {Measure::fractional(0.6).restricted(3.0), 3.0, 2.0 * oracle::power_integral(-0.2, 0.0, 3.0)},
      {Measure::uniform(2.5, 0.4), 2.5, 0.4 * 2.0 * oracle::power_integral(2.0, 0.0, 2.5)}};
  double worst_q = 0.0;
  for (const Q& q : qs) {
    std::vector<double> v;
    for (double x : g.coordinates()) v.push_back(x * x);
    const std::vector<double> d = apply(q.m, Profile(g, v, 0.0, 0.0), 0.0);
    for (int i = 0; i < g.nodes(); ++i)
      if (std::abs(g.x(i)) + q.radius < g.half_length() - 1.0)
        worst_q = std::max(worst_q, std::abs(d[i] - q.second) / q.second);
  }
  r.check(worst_q <= 1e-8, fmt("quadratic window identity: max rel. error %.2e", worst_q));

  std::mt19937 rng(20240611);
  double worst_adj = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Measure& m = trial % 2 ? kUniform : qs[1].m;
    const Profile phi(g, oracle::random_compact(rng, 401, 80), 0.0, 0.0);
    const Profile psi(g, oracle::random_compact(rng, 401, 80), 0.0, 0.0);
    worst_adj = std::max(worst_adj, adjoint_defect(m, phi, psi, 0.1));
  }
  r.check(worst_adj <= 1e-10, fmt("adjoint defect on 50 random compact pairs: max %.2e", worst_adj));
}

void bistable_fronts(Report& r) {
  const FrontSolution& u = fixtures().uniform;
  r.check(u.converged() && u.residual_norm <= 1e-10,
          fmt("uniform: converged, residual %.2e", u.residual_norm));
  r.check(monotone(u.profile) && u.speed > 0.0, fmt("uniform: monotone, c = %.10f > 0", u.speed));

  NewtonOptions narrow;
  narrow.width = kGrid.half_length() / 30.0;
  const FrontSolution u2 = newton_solve(kUniform, kCubic, kGrid, narrow);
  r.check(std::abs(u2.speed - u.speed) <= 1e-8,
          fmt("uniform: widths L/10 and L/30 agree, |dc| = %.2e", std::abs(u2.speed - u.speed)));

  const FrontSolution um = newton_solve(kUniform, kCubic.mirrored(), kGrid);
  const FrontSolution mirrored = mirror_front(u);
  r.check(um.converged() && std::abs(um.speed - mirrored.speed) <= 1e-6 &&
              sup_diff(um.profile, mirrored.profile) <= 1e-6,
          fmt("uniform: mirrored problem gives (-c, 1-u(-x)): |dc| = %.2e, |du| = %.2e",
              std::abs(um.speed - mirrored.speed), sup_diff(um.profile, mirrored.profile)));

  const ContinuationReport& rep = fixtures().fractional;
  r.check(!rep.failed_stage, fmt("fractional s=0.75: %zu continuation stages, none failed", rep.stages.size()));
  if (rep.failed_stage) return;
  const FrontSolution& f = rep.stages.back();
  r.check(f.residual_norm <= 1e-10, fmt("fractional: residual %.2e at eps = %.1e", f.residual_norm, f.epsilon));
  bool all_monotone = true;
  for (const FrontSolution& s : rep.stages) all_monotone = all_monotone && monotone(s.profile) && s.speed > 0;
  r.check(all_monotone, fmt("fractional: every stage monotone with c > 0; final c = %.10f", f.speed));

  NewtonOptions narrow_f = narrow;
  const ContinuationReport rep2 = continue_in_epsilon(kFrac, kCubic, kGrid, {}, narrow_f);
  const double dc = rep2.failed_stage ? INFINITY : std::abs(rep2.speeds.back() - f.speed);
  r.check(dc <= 1e-8, fmt("fractional: widths L/10 and L/30 agree, |dc| = %.2e", dc));

  NewtonOptions at_floor;
  at_floor.epsilon = f.epsilon;
  const FrontSolution fm = newton_solve(kFrac, kCubic.mirrored(), kGrid, at_floor);
  const FrontSolution fmir = mirror_front(f);
  r.check(fm.converged() && std::abs(fm.speed - fmir.speed) <= 1e-6 && sup_diff(fm.profile, fmir.profile) <= 1e-6,
          fmt("fractional: mirrored problem, |dc| = %.2e, |du| = %.2e", std::abs(fm.speed - fmir.speed),
              sup_diff(fm.profile, fmir.profile)));
}

void energy_identity(Report& r) {
  const FrontSolution coarse = fixtures().uniform;
  const FrontSolution fine = newton_solve(kUniform, kCubic, Grid(40.0, 3201));
  const IdentityChecks a = identity_checks(coarse, kUniform, kCubic);
  const IdentityChecks b = identity_checks(fine, kUniform, kCubic);
  r.check(a.relative1() <= 1e-2 && b.relative1() <= 1e-2,
          fmt("identity1 relative residual: %.3e (N=1601), %.3e (N=3201)", a.relative1(), b.relative1()));
  r.check(b.residual1 <= 0.5 * a.residual1,
          fmt("identity1 residual ratio under refinement: %.3f", b.residual1 / a.residual1));
  for (const IdentityChecks* k : {&a, &b})
    r.check(k->residual2 == 0.0 && k->residual3 == 0.0 && k->residual4 == 0.0,
            fmt("inequalities hold: %.3e <= %.3e, %.3e <= %.3e, %.3e <= %.3e", k->lhs2, k->rhs2, k->lhs3,
                k->rhs3, k->lhs4, k->rhs4));
}

void speed_sandwich(Report& r) {
  const Nonlinearity& f = kCubic;
  {
    const FrontSolution& u = fixtures().uniform;
    const ChenConstants k = chen_upper_bound(kUniform, f);
    const TruncatedBound lo = truncated_lower_bound(kUniform, f, kGrid, 0.99, 0.0, {}, u);
    r.check(lo.c_low <= u.speed && u.speed <= k.cbar,
            fmt("uniform: %.6f <= c = %.6f <= %.4e", lo.c_low, u.speed, k.cbar));
    r.check(std::abs(k.identity_defect()) <= 1e-12, fmt("uniform: sigma0 identity defect %.2e", k.identity_defect()));
    const SupersolutionAudit a = supersolution_audit(k, kUniform, f);
    r.check(a.min_slack >= -1e-6, fmt("uniform: supersolution audit min slack %.3e over %d samples", a.min_slack, a.samples));
  }
  const ContinuationReport& rep = fixtures().fractional;
  if (rep.failed_stage) {
    r.check(false, "fractional continuation failed");
    return;
  }
  const ChenConstants k = chen_upper_bound(kFrac, f);
  r.check(std::abs(k.identity_defect()) <= 1e-12, fmt("fractional: sigma0 identity defect %.2e", k.identity_defect()));
  const SupersolutionAudit a = supersolution_audit(k, kFrac, f);
  r.check(a.min_slack >= -1e-6, fmt("fractional: supersolution audit min slack %.3e over %d samples", a.min_slack, a.samples));

  bool sandwiched = true;
  double worst_gap = INFINITY;
  std::optional<FrontSolution> warm;
  for (std::size_t s = 0; s < rep.stages.size(); s += 3) {
    const FrontSolution& st = rep.stages[s];
    const TruncatedBound lo = truncated_lower_bound(kFrac, f, kGrid, 20.0, st.epsilon, {}, warm);
    warm = lo.front;
    sandwiched = sandwiched && lo.c_low <= st.speed && st.speed <= k.cbar;
    worst_gap = std::min(worst_gap, st.speed - lo.c_low);
  }
  const FrontSolution& last = rep.stages.back();
  const TruncatedBound lo = truncated_lower_bound(kFrac, f, kGrid, 20.0, last.epsilon, {}, warm);
  sandwiched = sandwiched && lo.c_low <= last.speed && last.speed <= k.cbar;
  r.check(sandwiched, fmt("fractional: c_low(r=20) <= c_eps <= cbar = %.4e along the continuation (min gap %.4f)",
                          k.cbar, std::min(worst_gap, last.speed - lo.c_low)));
  const TruncatedBound lo10 = truncated_lower_bound(kFrac, f, kGrid, 10.0, last.epsilon, {}, lo.front);
  r.note(fmt("fractional: c_low(r=10) = %.6f, c_low(r=20) = %.6f, c = %.6f", lo10.c_low, lo.c_low, last.speed));
}

void decay(Report& r) {
  const double ref = oracle::bisect([](double s) { return 2.0 * (std::sinh(s) / s - 1.0) - 0.15; }, 1e-3, 5.0);
  const DispersionReport d = dispersion_root(kUniform, -0.3);
  r.check(std::abs(d.rate - 0.664) <= 1e-3 && std::abs(d.rate - ref) <= 1e-10,
          fmt("dispersion root %.12f (bisection oracle %.12f), residual %.1e", d.rate, ref, d.residual));
  const TailFit t = tail_rate_fit(fixtures().uniform);
  r.check(t.rate >= 0.95 * d.rate, fmt("fitted tail rate %.6f >= 0.95 * %.6f (R^2 %.6f)", t.rate, d.rate, t.r2));
}

void ignition(Report& r) {
  const Nonlinearity ig = Nonlinearity::ignition(0.3);
  const FrontSolution a = newton_solve(kFrac, ig, kGrid);
  NewtonOptions narrow;
  narrow.width = kGrid.half_length() / 30.0;
  const FrontSolution b = newton_solve(kFrac, ig, kGrid, narrow);
  r.check(a.converged() && b.converged() && a.speed > 0.0 && monotone(a.profile),
          fmt("s=0.75: converged monotone front, c = %.10f", a.speed));
  r.check(std::abs(a.speed - b.speed) <= 1e-8, fmt("s=0.75: two initializations agree, |dc| = %.2e", std::abs(a.speed - b.speed)));
  const IgnitionIdentity id = ignition_identity(a, kFrac);
  r.check(id.route_gap <= 1e-3, fmt("s=0.75: flux formula vs direct integration gap %.2e * c theta", id.route_gap));
  r.check(id.residual <= 2e-2, fmt("s=0.75: c theta vs half-line flux relative residual %.2e", id.residual));

  const Measure m04 = Measure::fractional(0.4);
  const ContinuationReport rep = continue_in_epsilon(m04, ig, kGrid);
  r.check(rep.warning.has_value(), "s=0.4: nonexistence stamp present");
  const std::size_t k = rep.speeds.size();
  r.check(!rep.converged,
          fmt("s=0.4: continuation without Cauchy flag (last speeds %.10f, %.10f, failed stage %d)",
              k >= 2 ? rep.speeds[k - 2] : NAN, k >= 1 ? rep.speeds[k - 1] : NAN,
              rep.failed_stage ? *rep.failed_stage : -1));
  std::string growth;
  for (double L : {20.0, 40.0, 80.0}) {
    const FrontSolution s = newton_solve(m04, ig, Grid(L, static_cast<int>(40 * L) + 1));
    growth += fmt(" L=%g: %.4f%s", L, s.speed, s.converged() ? "" : "(nc)");
  }
  r.note("s=0.4: speed at fixed spacing as the domain grows:" + growth);
}

void monostable(Report& r) {
  {
    const Grid g(40.0, 1601);
    const Measure m = Measure::fractional(0.9).truncated(g.spacing() / 2.0);
    const Nonlinearity f = Nonlinearity::allee(3.0);
    const Barrier b = build_barrier(m, f, g);
    const MonostableReport rep = monostable_speed(m, f, g, {4, 8, 16, 32}, b);
    std::string speeds;
    for (double c : rep.speeds) speeds += fmt(" %.6f", c);
    r.check(!rep.violation, "allee beta=3, s=0.9: ladder speeds nondecreasing:" + speeds);
    r.check(rep.barrier && rep.barrier->strictly_negative,
            fmt("barrier residual max %.3e < 0 (kappa = %.6f)", rep.barrier ? rep.barrier->max_residual : NAN, b.kappa));
    r.check(rep.c_star <= b.kappa, fmt("c* = %.6f <= kappa = %.6f", rep.c_star, b.kappa));
  }
  {
    const Grid g(40.0, 1601);
    const Nonlinearity kpp = Nonlinearity::allee(1.0);
    std::vector<int> ladder;
    for (int n = 4; n <= (1 << 24); n *= 4) ladder.push_back(n);
    const MonostableReport rep = monostable_speed(kUniform, kpp, g, ladder);
    const auto [eta, c_lin] = oracle::golden_min(
        [](double e) { return (2.0 * (std::sinh(e) / e - 1.0) + 1.0) / e; }, 0.05, 10.0);
    r.check(!rep.violation, fmt("KPP uniform: ladder of %zu rungs nondecreasing, c(2^24) = %.6f", ladder.size(), rep.speeds.back()));
    r.check(rep.c_star >= c_lin - 1e-6,
            fmt("KPP uniform: c* = %.8f >= linear speed %.8f (eta = %.4f)", rep.c_star, c_lin, eta));
  }
}

struct Sweep {
  double s;
  double beta;  // 0 for the bistable run
  double L;
  int N;
  double T;
};

RegimeVerdict spread(const Sweep& w, const Nonlinearity& f) {
  const Grid g(w.L, w.N);
  EvolveOptions o;
  o.horizon = w.T;
  o.samples = 400;
  o.keep_states = false;
  o.level = 0.5;
  o.window = 0.7 * w.L;
  o.stop_at_window = true;
  const Trajectory tr = evolve(heaviside_ramp(g, -0.9 * w.L), Measure::fractional(w.s), f, o);
  return classify_spreading(tr);
}

void regimes(Report& r) {
  // horizons keep the level set inside the window; the s=0.25 fronts grow like t^4 and t^2.7
  const std::vector<Sweep> corners{{0.25, 2.0, 32768.0, 32769, 16.0},
                                   {0.25, 4.0, 32768.0, 32769, 54.0},
                                   {0.75, 2.0, 4096.0, 4097, 2000.0},
                                   {0.75, 4.0, 4096.0, 4097, 1200.0}};
  for (const Sweep& w : corners) {
    const RegimePrediction p = regime_prediction(w.s, w.beta);
    const RegimeVerdict v = spread(w, Nonlinearity::allee(w.beta));
    const std::string head = fmt("(s=%.2f, beta=%g): predicted %s", w.s, w.beta, to_string(p.tag).c_str());
    if (p.tag == Regime::Algebraic) {
      const double rel = std::abs(v.value - *p.exponent) / *p.exponent;
      r.check(v.tag == Regime::Algebraic && rel <= 0.15,
              head + fmt(" %.4f, observed %s %.4f (rel. %.1f%%, R^2 %.5f)", *p.exponent, to_string(v.tag).c_str(),
                         v.value, 100 * rel, v.r2));
    } else {
      const Grid g(800.0, 1601);
      const MonostableReport tw = monostable_speed(Measure::fractional(w.s), Nonlinearity::allee(w.beta), g, {4, 8, 16, 32});
      const double rel = std::abs(v.value - tw.c_star) / tw.c_star;
      r.check(v.tag == Regime::Front && rel <= 0.05,
              head + fmt(", observed %s speed %.4f vs traveling wave %.4f (rel. %.1f%%)", to_string(v.tag).c_str(),
                         v.value, tw.c_star, 100 * rel));
    }
  }
  const Sweep bi{0.25, 0.0, 16384.0, 16385, 130.0};
  const RegimePrediction p = bistable_regime_prediction(0.25);
  const RegimeVerdict v = spread(bi, kCubic);
  const double rel = std::abs(v.value - *p.exponent) / *p.exponent;
  r.check(v.tag == Regime::Algebraic && rel <= 0.15,
          fmt("bistable s=0.25: predicted ALGEBRAIC %.3f, observed %s %.4f (log-log slope %.4f, linear R^2 %.5f)",
              *p.exponent, to_string(v.tag).c_str(), v.value, v.loglog_slope, v.r2_linear));
  const RegimeVerdict vi = spread({0.25, 0.0, 16384.0, 16385, 60.0}, Nonlinearity::ignition(0.3));
  r.note(fmt("ignition s=0.25 on the same grid: %s %.4f (log-log slope %.4f)", to_string(vi.tag).c_str(), vi.value,
             vi.loglog_slope));
}

void comparison(Report& r) {
  const Grid g(20.0, 401);
  std::mt19937 rng(777);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  EvolveOptions o;
  o.horizon = 5.0;
  o.samples = 25;
  double worst = 0.0;
  bool ordered = true;
  for (int pair = 0; pair < 10; ++pair) {
    const Measure& m = pair % 2 ? kUniform : kFrac;
    std::vector<double> lo(401), hi(401);
    for (int i = 0; i < 401; ++i) {
      const double ramp = g.x(i) < 0 ? 1.0 : 0.0;
      lo[i] = ramp * d(rng) * 0.8;
      hi[i] = std::min(1.0, lo[i] + d(rng) * 0.3);
    }
    const Trajectory a = evolve(Profile(g, lo, lo.front(), 0.0), m, kCubic, o);
    const Trajectory b = evolve(Profile(g, hi, std::max(lo.front(), hi.front()), 0.0), m, kCubic, o);
    const ComparisonAudit au = parabolic_comparison_audit(a, b);
    ordered = ordered && au.ordered;
    worst = std::max(worst, au.max_violation);
  }
  r.check(ordered, fmt("10 ordered random pairs stay ordered, max violation %.2e", worst));

  bool mono = true;
  std::string trail;
  for (const Measure* m : {&kUniform, &kFrac}) {
    double prev = -INFINITY;
    for (double theta : {0.35, 0.3, 0.25}) {
      const FrontSolution s = newton_solve(*m, Nonlinearity::cubic(theta), kGrid);
      mono = mono && s.converged() && s.speed >= prev - 1e-8;
      trail += fmt(" %.6f", s.speed);
      prev = s.speed;
    }
    trail += " |";
  }
  r.check(mono, "speeds nondecreasing as theta decreases:" + trail);

  const FrontSolution& u = fixtures().uniform;
  EvolveOptions t;
  t.horizon = 5.0;
  t.samples = 5;
  const Trajectory tr = evolve(u.profile, kUniform, kCubic, t);
  double err = 0.0;
  for (int i = 0; i < kGrid.nodes(); ++i)
    err = std::max(err, std::abs(tr.states.back()[i] - u.profile.interpolate(kGrid.x(i) - u.speed * 5.0)));
  r.check(err <= 5e-3, fmt("front translation sup error at T=5: %.2e", err));
}

struct Criterion {
  int id;
  const char* title;
  double budget;  // seconds
  std::function<void(Report&)> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "operator correctness", 10.0, operator_correctness},
      {2, "bistable fronts: existence, sign, mirror, uniqueness", 120.0, bistable_fronts},
      {3, "energy identity and a priori bounds", 60.0, energy_identity},
      {4, "speed sandwich", 120.0, speed_sandwich},
      {5, "exponential decay rate", 30.0, decay},
      {6, "ignition fronts and the first-moment gate", 180.0, ignition},
      {7, "monostable cutoff ladder", 240.0, monostable},
      {8, "spreading regimes", 600.0, regimes},
      {9, "comparison audits", 180.0, comparison},
  };
  // the shared fronts count toward the criteria that first use them
  int failed = 0;
  for (const Criterion& c : criteria) {
    std::printf("criterion %d: %s\n", c.id, c.title);
    std::fflush(stdout);
    Report r;
    const auto t0 = Clock::now();
    try {
      c.run(r);
    } catch (const std::exception& e) {
      r.check(false, std::string("exception: ") + e.what());
    }
    const double dt = seconds_since(t0);
    r.check(dt <= c.budget, fmt("runtime %.1f s within %.0f s", dt, c.budget));
    std::printf("%s criterion %d (%s)\n", r.ok ? "PASS" : "FAIL", c.id, c.title);
    std::fflush(stdout);
    failed += r.ok ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed;
}
