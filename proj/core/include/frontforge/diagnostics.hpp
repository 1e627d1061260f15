#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "frontforge/measure.hpp"
#include "frontforge/nonlinearity.hpp"
#include "frontforge/tw_solver.hpp"

namespace frontforge {

// Energy identity and a priori bounds for a front of a finite-mass measure.
struct IdentityChecks {
  double residual1 = 0.0;  // |c |u'|_2^2 - int_0^1 f|
  double residual2 = 0.0;  // slack violations, zero when the inequality holds
  double residual3 = 0.0;
  double residual4 = 0.0;
  double energy = 0.0;     // c |u'|_2^2
  double integral = 0.0;   // int_0^1 f
  double total_mass = 0.0;
  double lhs2 = 0.0, rhs2 = 0.0;
  double lhs3 = 0.0, rhs3 = 0.0;
  double lhs4 = 0.0, rhs4 = 0.0;

  double relative1() const { return integral != 0.0 ? residual1 / std::abs(integral) : residual1; }
};

IdentityChecks identity_checks(const FrontSolution& sol, const Measure& m, const Nonlinearity& nl);

struct DispersionReport {
  double rate = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  double residual = 0.0;
  bool monotone_on_bracket = true;
};

// h(s) = int (cosh(s z) - 1) dmu(z) + slope / 2.
double dispersion_function(const Measure& m, double slope_at_zero, double rate);
DispersionReport dispersion_root(const Measure& m, double slope_at_zero);

struct TailFit {
  double rate = 0.0;
  double r2 = 0.0;
  int points = 0;
  bool exponential = false;  // false flags a nonexponential tail (r2 < 0.98)
};

// Least squares of log u on the rightmost `window` fraction of nodes with u in [1e-8, 1e-2].
TailFit tail_rate_fit(const Profile& u, double window = 0.5);
TailFit tail_rate_fit(const FrontSolution& sol, double window = 0.5);

struct ChenConstants {
  double rho = 0.0;
  double theta = 0.0;
  double m_rho = 0.0;
  double R_rho = 0.0;
  double M_rho = 0.0;
  double sigma0 = 0.0;
  double cbar = 0.0;
  double zeta_prime_min = 0.0;
  double f_sup = 0.0;

  // Residual of M sigma0^2 + theta sigma0 - m/2.
  double identity_defect() const { return M_rho * sigma0 * sigma0 + theta * sigma0 - 0.5 * m_rho; }
  double amplitude(double t) const;  // 1 - (theta - 2 rho) e^{-sigma0 t}
  double w_plus(double t, double x) const;
  double w_plus_dt(double t, double x) const;
  double x1(double t) const;
};

// Ramp with zeta = 0 below 0, 1 above 4 and |zeta''| <= 1: smoothstep(s / 4).
double chen_zeta(double s);
double chen_zeta_prime(double s);
double chen_zeta_second(double s);
double chen_zeta_inverse(double v);

ChenConstants chen_upper_bound(const Measure& m, const Nonlinearity& nl,
                               std::optional<double> rho = std::nullopt);

struct SupersolutionAudit {
  double min_slack = 0.0;
  double worst_t = 0.0;
  double worst_xi = 0.0;  // comoving coordinate x - cbar t
  int samples = 0;
};

// d_t w+ - D[w+] - f(w+) on x >= x1(t) for t in {0, dt, ..., t_max}, evaluated in the
// frame moving with cbar (the operator is translation invariant).
SupersolutionAudit supersolution_audit(const ChenConstants& k, const Measure& m,
                                       const Nonlinearity& nl, double t_max = 10.0,
                                       double dt = 0.5, int max_nodes = 8001);

struct TruncatedBound {
  double c_low = 0.0;
  double tau = 0.0;
  double gamma = 1.0;
  double integral = 0.0;  // int_0^gamma f_r
  FrontSolution front;
};

// Front of (mu restricted to [-r, r] and truncated at eps, f - tau s) with left state gamma_r.
TruncatedBound truncated_lower_bound(const Measure& m, const Nonlinearity& nl, const Grid& g,
                                     double r, double eps, const NewtonOptions& options = {},
                                     const std::optional<FrontSolution>& warm = std::nullopt);

struct IgnitionIdentity {
  double lhs = 0.0;            // c theta
  double formula = 0.0;        // int_0^L D[u~] from the cell-moment formula
  double direct = 0.0;         // trapezoid of the discrete operator over [0, L]
  double residual = 0.0;       // |lhs - formula| / |lhs|
  double route_gap = 0.0;      // |formula - direct| / |lhs|
};

// For a front with u(0) = theta: c theta = int_{R+} D[u].
IgnitionIdentity ignition_identity(const FrontSolution& sol, const Measure& m);
// int_a^inf D[u~](x) dx for the piecewise-linear extension of p, a at node `node`.
double half_line_flux(const Profile& p, const Measure& m, int node);

struct Antiderivatives {
  std::vector<double> v;  // int_x^inf u
  std::vector<double> w;  // int_x^inf v
};

// Right-to-left cumulative trapezoid, with the piecewise-linear tail beyond the grid.
Antiderivatives antiderivatives(const Profile& u);

struct AntiderivativeCheck {
  bool w_convex = false;
  double min_second_difference = 0.0;
  double eq_v_residual = 0.0;  // sup |c u - D v - int_x^inf f(u)| / |v|_inf
  double eq_w_residual = 0.0;  // sup |c v - D w - int_x^inf int_y^inf f(u)| / |w|_inf
};

AntiderivativeCheck antiderivative_check(const FrontSolution& sol, const Measure& m,
                                         const Nonlinearity& nl);

struct DiagnosticsOptions {
  bool chen = true;
  std::optional<double> lower_bound_radius;  // solve the truncated problem when set
  double tail_window = 0.5;
};

// Fills every applicable entry of sol.diagnostics.
void fill_diagnostics(FrontSolution& sol, const Measure& m, const Nonlinearity& nl,
                      const DiagnosticsOptions& options = {});

}  // namespace frontforge
