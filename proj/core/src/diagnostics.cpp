#include "frontforge/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "frontforge/error.hpp"
#include "frontforge/nonlocal_operator.hpp"
#include "frontforge/quadrature.hpp"

namespace frontforge {

namespace {

Measure solved_measure(const FrontSolution& sol, const Measure& m) {
  return sol.epsilon > 0.0 ? m.truncated(sol.epsilon) : m;
}

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r2 = 0.0;
};

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
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
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - fit.intercept - fit.slope * x[i];
    ss_res += e * e;
  }
  fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

// Running integral of the piecewise-linear extension of p, measured from node -1.
class ExtendedPrimitive {
 public:
  explicit ExtendedPrimitive(const Profile& p) : p_(p), h_(p.grid.spacing()) {
    const int n = p.grid.nodes();
    cumulative_.assign(static_cast<std::size_t>(n) + 2, 0.0);
    for (int j = -1; j < n; ++j)
      cumulative_[static_cast<std::size_t>(j + 2)] =
          cumulative_[static_cast<std::size_t>(j + 1)] +
          0.5 * h_ * (p.extended(j) + p.extended(j + 1));
  }

  double operator()(double y) const {
    const int n = p_.grid.nodes();
    const double x_first = p_.grid.x(0) - h_;
    const double x_last = p_.grid.x(n - 1) + h_;
    if (y <= x_first) return -p_.left_state * (x_first - y);
    if (y >= x_last) return cumulative_.back() + p_.right_state * (y - x_last);
    const double t = (y - x_first) / h_;
    int j = static_cast<int>(std::floor(t));
    j = std::min(j, n);
    const double s = (t - j) * h_;
    const double a = p_.extended(j - 1);
    const double b = p_.extended(j);
    return cumulative_[static_cast<std::size_t>(j)] + a * s + 0.5 * (b - a) * s * s / h_;
  }

 private:
  const Profile& p_;
  double h_;
  std::vector<double> cumulative_;
};

}  // namespace

IdentityChecks identity_checks(const FrontSolution& sol, const Measure& m, const Nonlinearity& nl) {
  const Measure mu = solved_measure(sol, m);
  const auto mass = mu.total_mass();
  if (!mass) throw Error(ErrorCode::UnboundedSupport, "identity checks need a finite-mass measure");
  const Profile& u = sol.profile;
  const int n = u.grid.nodes();
  const double h = u.grid.spacing();
  const double c = sol.speed;

  double d1_l2 = 0.0, d1_inf = 0.0, d2_l2 = 0.0, d2_inf = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d1 = (u.extended(i + 1) - u.extended(i - 1)) / (2.0 * h);
    const double d2 = (u.extended(i + 1) - 2.0 * u[i] + u.extended(i - 1)) / (h * h);
    d1_l2 += h * d1 * d1;
    d2_l2 += h * d2 * d2;
    d1_inf = std::max(d1_inf, std::abs(d1));
    d2_inf = std::max(d2_inf, std::abs(d2));
  }
  const double f_sup = nl.sup_norm();
  const double df_sup = nl.sup_norm_derivative();

  IdentityChecks out;
  out.total_mass = *mass;
  out.integral = nl.definite_integral(0.0, 1.0);
  out.energy = c * d1_l2;
  out.residual1 = std::abs(out.energy - out.integral);
  out.lhs2 = std::abs(c) * d1_inf;
  out.rhs2 = 2.0 * *mass + f_sup;
  out.lhs3 = c * c * d2_inf;
  out.rhs3 = std::pow(2.0 * *mass + f_sup + df_sup, 2);
  out.lhs4 = std::pow(std::abs(c), 3) * d2_l2;
  out.rhs4 = std::pow(*mass + df_sup, 2) * std::abs(out.integral);
  out.residual2 = std::max(0.0, out.lhs2 - out.rhs2);
  out.residual3 = std::max(0.0, out.lhs3 - out.rhs3);
  out.residual4 = std::max(0.0, out.lhs4 - out.rhs4);
  return out;
}

double dispersion_function(const Measure& m, double slope_at_zero, double rate) {
  const double lo = m.epsilon();
  const double hi = m.outer_radius();
  if (!std::isfinite(hi)) throw Error(ErrorCode::UnboundedSupport, "dispersion needs bounded support");
  if (m.fractional_exponent() && rate * hi < 40.0) {
    // sum_k rate^{2k} / (2k)! int z^{2k} J, using the closed-form moments.
    double sum = 0.0;
    double coeff = 1.0;
    for (int k = 1; k < 400; ++k) {
      coeff *= rate * rate / ((2.0 * k - 1.0) * (2.0 * k));
      const double term = coeff * m.one_sided_moment(2 * k, 0.0, hi);
      sum += term;
      if (k > 3 && std::abs(term) <= 1e-18 * std::abs(sum)) break;
    }
    return 2.0 * sum + 0.5 * slope_at_zero;
  }
  auto integrand = [&m, rate](double z) {
    const double s = std::sinh(0.5 * rate * z);
    return 2.0 * s * s * m.density_at(z);
  };
  const double integral = hi > lo ? quad::integrate(integrand, lo, hi, {1e-15, 1e-300}) : 0.0;
  return 2.0 * integral + 0.5 * slope_at_zero;
}

DispersionReport dispersion_root(const Measure& m, double slope_at_zero) {
  if (!m.bounded_support()) throw Error(ErrorCode::UnboundedSupport, "dispersion needs bounded support");
  if (!(slope_at_zero < 0.0)) throw Error(ErrorCode::BadParameters, "slope at zero must be negative");
  auto h = [&](double s) { return dispersion_function(m, slope_at_zero, s); };

  double lo = 0.0;
  double hi = 1.0;
  int expansions = 0;
  while (h(hi) <= 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++expansions > 60) throw Error(ErrorCode::NoBracket, "h stays negative; measure too small");
  }
  DispersionReport out;
  out.bracket_lo = lo;
  out.bracket_hi = hi;
  double prev = h(0.0);
  for (int i = 1; i <= 64; ++i) {
    const double cur = h(hi * i / 64.0);
    if (cur < prev) out.monotone_on_bracket = false;
    prev = cur;
  }
  for (int it = 0; it < 200 && hi - lo > 2.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (h(mid) > 0.0 ? hi : lo) = mid;
  }
  const double hl = h(lo);
  const double hh = h(hi);
  out.rate = std::abs(hl) <= std::abs(hh) ? lo : hi;
  out.residual = std::min(std::abs(hl), std::abs(hh));
  return out;
}

TailFit tail_rate_fit(const Profile& u, double window) {
  if (!(window > 0.0 && window <= 1.0)) throw Error(ErrorCode::BadParameters, "window must lie in (0,1]");
  const int n = u.grid.nodes();
  const int start = static_cast<int>(std::floor(n * (1.0 - window)));
  std::vector<double> xs, ys;
  for (int i = start; i < n; ++i) {
    const double v = u[i];
    if (v >= 1e-8 && v <= 1e-2) {
      xs.push_back(u.grid.x(i));
      ys.push_back(std::log(v));
    }
  }
  if (xs.size() < 3) throw Error(ErrorCode::BadParameters, "too few tail points in [1e-8, 1e-2]");
  const LinearFit fit = least_squares(xs, ys);
  TailFit out;
  out.rate = std::max(0.0, -fit.slope);
  out.r2 = fit.r2;
  out.points = static_cast<int>(xs.size());
  out.exponential = fit.r2 >= 0.98;
  return out;
}

TailFit tail_rate_fit(const FrontSolution& sol, double window) {
  return tail_rate_fit(sol.profile, window);
}

double chen_zeta(double s) { return smoothstep(0.25 * s); }
double chen_zeta_prime(double s) { return 0.25 * smoothstep_derivative(0.25 * s); }
double chen_zeta_second(double s) { return 0.0625 * smoothstep_second_derivative(0.25 * s); }

double chen_zeta_inverse(double v) {
  if (v <= 0.0) return 0.0;
  if (v >= 1.0) return 4.0;
  return quad::bisect([v](double s) { return chen_zeta(s) - v; }, 0.0, 4.0, 1e-14);
}

double ChenConstants::amplitude(double t) const {
  return 1.0 - (theta - 2.0 * rho) * std::exp(-sigma0 * t);
}

double ChenConstants::w_plus(double t, double x) const {
  return (1.0 + rho) - amplitude(t) * chen_zeta(sigma0 * (x - cbar * t));
}

double ChenConstants::w_plus_dt(double t, double x) const {
  const double arg = sigma0 * (x - cbar * t);
  return cbar * sigma0 * chen_zeta_prime(arg) * amplitude(t) -
         sigma0 * (theta - 2.0 * rho) * std::exp(-sigma0 * t) * chen_zeta(arg);
}

double ChenConstants::x1(double t) const {
  return cbar * t + chen_zeta_inverse(rho / amplitude(t)) / sigma0;
}

ChenConstants chen_upper_bound(const Measure& m, const Nonlinearity& nl, std::optional<double> rho) {
  if (nl.declared_class() != ReactionClass::Bistable || !nl.threshold())
    throw Error(ErrorCode::WrongClass, "Chen bound needs a bistable term with a threshold");
  ChenConstants k;
  k.theta = *nl.threshold();
  k.rho = rho.value_or(std::min(k.theta, 1.0 - k.theta) / 8.0);
  if (!(k.rho > 0.0 && k.rho < std::min(k.theta, 1.0 - k.theta) / 4.0))
    throw Error(ErrorCode::BadParameters, "rho must lie in (0, min(theta, 1 - theta) / 4)");

  for (int i = 1; i < 4000; ++i)
    if (std::abs(chen_zeta_second(4.0 * i / 4000.0)) > 1.0)
      throw Error(ErrorCode::BadParameters, "ramp violates |zeta''| <= 1");

  k.m_rho = quad::minimize([&nl](double s) { return -nl.value(s); }, k.rho, k.theta - 0.5 * k.rho).value;
  if (!(k.m_rho > 0.0)) throw Error(ErrorCode::ClassViolation, "-f is not positive below threshold");
  k.zeta_prime_min = quad::minimize(chen_zeta_prime, k.rho, 1.0 - 0.5 * k.rho).value;
  k.f_sup = nl.sup_norm();

  const double target = k.m_rho / 8.0;
  double hi = 1.0;
  for (int i = 0; m.mass_tail(hi) > target; ++i) {
    hi *= 2.0;
    if (i > 1000) throw Error(ErrorCode::BadParameters, "tail mass never drops below m_rho / 8");
  }
  double lo = hi;
  while (lo > 1e-300 && m.mass_tail(lo) <= target) lo *= 0.5;
  if (m.mass_tail(lo) <= target) {
    k.R_rho = lo;
  } else {
    k.R_rho = quad::bisect([&](double r) { return m.mass_tail(r) - target; }, lo, hi, 1e-13 * hi);
    // Keep the side where the tail condition holds.
    if (m.mass_tail(k.R_rho) > target) k.R_rho = std::nextafter(k.R_rho, kInfinity) + 1e-13 * hi;
  }
  k.M_rho = 0.5 * m.window_second_moment(k.R_rho);
  if (k.M_rho > 0.0)
    k.sigma0 = (std::sqrt(k.theta * k.theta + 2.0 * k.M_rho * k.m_rho) - k.theta) / (2.0 * k.M_rho);
  else
    k.sigma0 = k.m_rho / (2.0 * k.theta);
  k.cbar = (1.0 + k.f_sup + k.m_rho) / ((1.0 - k.theta) * k.sigma0 * k.zeta_prime_min);
  return k;
}

SupersolutionAudit supersolution_audit(const ChenConstants& k, const Measure& m,
                                       const Nonlinearity& nl, double t_max, double dt,
                                       int max_nodes) {
  if (!(dt > 0.0) || t_max < 0.0) throw Error(ErrorCode::BadParameters, "audit times");
  const double span = 4.0 / k.sigma0;
  const double half = 1.05 * span + 1.0;
  const int nodes = max_nodes % 2 == 1 ? max_nodes : max_nodes - 1;
  const Grid g(half, nodes);
  const DiscreteOperator op(m, g, 0.0);

  SupersolutionAudit audit;
  audit.min_slack = kInfinity;
  std::vector<double> w(static_cast<std::size_t>(nodes));
  std::vector<double> dw(static_cast<std::size_t>(nodes));
  const int steps = static_cast<int>(std::floor(t_max / dt + 1e-9));
  for (int s = 0; s <= steps; ++s) {
    const double t = s * dt;
    const double a = k.amplitude(t);
    for (int i = 0; i < nodes; ++i)
      w[static_cast<std::size_t>(i)] = (1.0 + k.rho) - a * chen_zeta(k.sigma0 * g.x(i));
    op.apply(w.data(), 1.0 + k.rho, (1.0 + k.rho) - a, dw.data());
    const double xi1 = chen_zeta_inverse(k.rho / a) / k.sigma0;
    for (int i = 0; i < nodes; ++i) {
      const double xi = g.x(i);
      if (xi < xi1) continue;
      const double x = xi + k.cbar * t;
      const double slack = k.w_plus_dt(t, x) - dw[static_cast<std::size_t>(i)] -
                           nl.value(w[static_cast<std::size_t>(i)]);
      ++audit.samples;
      if (slack < audit.min_slack) {
        audit.min_slack = slack;
        audit.worst_t = t;
        audit.worst_xi = xi;
      }
    }
  }
  return audit;
}

TruncatedBound truncated_lower_bound(const Measure& m, const Nonlinearity& nl, const Grid& g,
                                     double r, double eps, const NewtonOptions& options,
                                     const std::optional<FrontSolution>& warm) {
  const double tau = m.mass_tail(r);
  const ShiftResult shift = nl.shift_by_tail_mass(tau);
  if (!shift.largest_root || !shift.integral_to_root || *shift.integral_to_root <= 0.0)
    throw Error(ErrorCode::TailTooHeavy, "no admissible root gamma_r at this radius");
  const double gamma = *shift.largest_root;

  Measure mu = m.restricted(r);
  if (eps > 0.0) mu = mu.truncated(eps);
  NewtonOptions opts = options;
  opts.left_state = gamma;
  opts.right_state = 0.0;
  opts.epsilon = 0.0;
  if (!opts.phase_level) opts.phase_level = nl.threshold().value_or(0.5 * gamma);

  FrontSolution front = [&] {
    if (!warm) return newton_solve(mu, shift.shifted, g, opts);
    const Profile& p = warm->profile;
    std::vector<double> v(p.values.size());
    const double scale = gamma / p.left_state;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = scale * p.values[i];
    return newton_solve_from(mu, shift.shifted, Profile(p.grid, std::move(v), gamma, 0.0),
                             warm->speed, opts);
  }();
  if (!front.converged())
    throw Error(ErrorCode::NoConvergence, "truncated problem status " + to_string(front.status));
  front.epsilon = eps;
  return TruncatedBound{front.speed, tau, gamma, *shift.integral_to_root, std::move(front)};
}

double half_line_flux(const Profile& p, const Measure& m, int node) {
  const int n = p.grid.nodes();
  if (node < 0 || node >= n) throw Error(ErrorCode::BadParameters, "flux node outside the grid");
  const double h = p.grid.spacing();
  const double a = p.grid.x(node);
  const ExtendedPrimitive prim(p);
  const double pa = prim(a);
  auto q = [&](double z) { return (pa - prim(a - z)) - (prim(a + z) - pa); };

  double total = 0.0;
  // First cell: q(z) = -(s_left + s_right) z^2 / 2 exactly.
  total += q(h) / (h * h) * m.one_sided_moment(2, 0.0, h);
  const int cells = std::max(node + 2, n + 1 - node) + 1;
  for (int k = 1; k < cells; ++k) {
    const double z0 = k * h;
    const double z1 = z0 + h;
    const double m0 = m.one_sided_moment(0, z0, z1);
    if (m0 == 0.0) continue;
    const double m1 = m.one_sided_moment(1, z0, z1);
    const double m2 = m.one_sided_moment(2, z0, z1);
    const double q0 = q(z0);
    const double qm = q(z0 + 0.5 * h);
    const double q1 = q(z1);
    // q = A + B t + C t^2 with t = (z - z0) / h.
    const double C = 2.0 * (q1 - 2.0 * qm + q0);
    const double B = q1 - q0 - C;
    const double t1 = (m1 - z0 * m0) / h;
    const double t2 = (m2 - 2.0 * z0 * m1 + z0 * z0 * m0) / (h * h);
    total += q0 * m0 + B * t1 + C * t2;
  }
  // Beyond both far ends q grows linearly with slope left - right.
  const double z_end = cells * h;
  const double tail0 = m.one_sided_moment(0, z_end, kInfinity);
  const double tail1 = m.one_sided_moment(1, z_end, kInfinity);
  const double slope = p.left_state - p.right_state;
  if (slope != 0.0 && !std::isfinite(tail1)) return kInfinity;
  total += q(z_end) * tail0 + slope * (tail1 - z_end * tail0);
  return total;
}

IgnitionIdentity ignition_identity(const FrontSolution& sol, const Measure& m) {
  const Measure mu = solved_measure(sol, m);
  const Profile& p = sol.profile;
  const int n = p.grid.nodes();
  const int center = p.grid.center();
  const double h = p.grid.spacing();

  IgnitionIdentity out;
  out.lhs = sol.speed * p.at_center();
  out.formula = half_line_flux(p, mu, center) - half_line_flux(p, mu, n - 1);

  const DiscreteOperator op(mu, p.grid, 0.0);
  const std::vector<double> du = op.apply(p);
  double direct = 0.0;
  for (int i = center; i < n; ++i) {
    const double weight = (i == center || i == n - 1) ? 0.5 : 1.0;
    direct += weight * h * du[static_cast<std::size_t>(i)];
  }
  out.direct = direct;
  const double scale = std::abs(out.lhs) > 0.0 ? std::abs(out.lhs) : 1.0;
  out.residual = std::abs(out.lhs - out.formula) / scale;
  out.route_gap = std::abs(out.formula - out.direct) / scale;
  return out;
}

Antiderivatives antiderivatives(const Profile& u) {
  if (u.right_state != 0.0)
    throw Error(ErrorCode::BadParameters, "antiderivatives need a zero right state");
  const int n = u.grid.nodes();
  const double h = u.grid.spacing();
  Antiderivatives out;
  out.v.assign(static_cast<std::size_t>(n), 0.0);
  out.w.assign(static_cast<std::size_t>(n), 0.0);
  // Linear ramp from u[n-1] to the zero right state over one cell.
  out.v.back() = 0.5 * h * u[n - 1];
  out.w.back() = h * h * u[n - 1] / 6.0;
  for (int i = n - 2; i >= 0; --i) {
    const auto j = static_cast<std::size_t>(i);
    out.v[j] = out.v[j + 1] + 0.5 * h * (u[i] + u[i + 1]);
    out.w[j] = out.w[j + 1] + 0.5 * h * (out.v[j] + out.v[j + 1]);
  }
  return out;
}

AntiderivativeCheck antiderivative_check(const FrontSolution& sol, const Measure& m,
                                         const Nonlinearity& nl) {
  const Measure mu = solved_measure(sol, m);
  if (!mu.bounded_support()) throw Error(ErrorCode::UnboundedSupport, "antiderivative check needs bounded support");
  const Profile& u = sol.profile;
  const int n = u.grid.nodes();
  const double h = u.grid.spacing();
  const double c = sol.speed;
  const Antiderivatives a = antiderivatives(u);

  std::vector<double> g1(static_cast<std::size_t>(n), 0.0);
  std::vector<double> g2(static_cast<std::size_t>(n), 0.0);
  for (int i = n - 2; i >= 0; --i) {
    const auto j = static_cast<std::size_t>(i);
    g1[j] = g1[j + 1] + 0.5 * h * (nl.value(u[i]) + nl.value(u[i + 1]));
    g2[j] = g2[j + 1] + 0.5 * h * (g1[j] + g1[j + 1]);
  }

  const DiscreteOperator op(mu, u.grid, 0.0);
  std::vector<double> dv(static_cast<std::size_t>(n));
  std::vector<double> dw(static_cast<std::size_t>(n));
  op.apply(a.v.data(), a.v.front(), 0.0, dv.data());
  op.apply(a.w.data(), a.w.front(), 0.0, dw.data());

  const int margin = static_cast<int>(std::ceil((mu.outer_radius() + h) / h)) + 1;
  double v_sup = 0.0, w_sup = 0.0;
  for (int i = 0; i < n; ++i) {
    v_sup = std::max(v_sup, std::abs(a.v[static_cast<std::size_t>(i)]));
    w_sup = std::max(w_sup, std::abs(a.w[static_cast<std::size_t>(i)]));
  }
  AntiderivativeCheck out;
  out.min_second_difference = kInfinity;
  for (int i = margin; i < n - margin; ++i) {
    const auto j = static_cast<std::size_t>(i);
    const double rv = c * u[i] - dv[j] - g1[j];
    const double rw = c * a.v[j] - dw[j] - g2[j];
    out.eq_v_residual = std::max(out.eq_v_residual, std::abs(rv));
    out.eq_w_residual = std::max(out.eq_w_residual, std::abs(rw));
  }
  for (int i = 1; i + 1 < n; ++i) {
    const auto j = static_cast<std::size_t>(i);
    out.min_second_difference =
        std::min(out.min_second_difference, a.w[j + 1] - 2.0 * a.w[j] + a.w[j - 1]);
  }
  out.eq_v_residual /= v_sup > 0.0 ? v_sup : 1.0;
  out.eq_w_residual /= w_sup > 0.0 ? w_sup : 1.0;
  out.w_convex = out.min_second_difference >= -1e-9;
  return out;
}

void fill_diagnostics(FrontSolution& sol, const Measure& m, const Nonlinearity& nl,
                      const DiagnosticsOptions& options) {
  DiagnosticsRecord& d = sol.diagnostics;
  const Measure mu = solved_measure(sol, m);
  const ReactionClass cls = nl.declared_class();

  if (mu.finite_mass()) {
    const IdentityChecks ic = identity_checks(sol, m, nl);
    d.identity1 = ic.residual1;
    d.identity2 = ic.residual2;
    d.identity3 = ic.residual3;
    d.identity4 = ic.residual4;
  }
  if (cls == ReactionClass::Bistable && nl.threshold() && nl.linear_shift() == 0.0) {
    if (options.chen) {
      const ChenConstants k = chen_upper_bound(m, nl);
      d.sigma0 = k.sigma0;
      d.cbar = k.cbar;
    }
    if (options.lower_bound_radius)
      d.clow = truncated_lower_bound(m, nl, sol.profile.grid, *options.lower_bound_radius,
                                     sol.epsilon, {}, sol)
                   .c_low;
    const double slope = nl.evaluate(0.0).derivative;
    if (mu.bounded_support() && slope < 0.0) {
      d.decay_rate_theory = dispersion_root(mu, slope).rate;
      try {
        d.decay_rate_fit = tail_rate_fit(sol, options.tail_window).rate;
      } catch (const Error&) {
      }
    }
  }
  if (mu.bounded_support() && sol.profile.right_state == 0.0)
    d.w_convex = antiderivative_check(sol, m, nl).w_convex;
  if (cls == ReactionClass::Ignition && mu.moments().m_first)
    d.ign_identity = ignition_identity(sol, m).residual;
}

}  // namespace frontforge
