#pragma once

#include <functional>
#include <optional>

namespace frontforge::quad {

struct Tolerance {
  double relative = 1e-10;
  double absolute = 1e-14;
};

struct Estimate {
  double value = 0.0;
  double error = 0.0;
  bool converged = false;
};

// Globally adaptive Gauss-Legendre panels with bisection refinement.
Estimate integrate_estimate(const std::function<double(double)>& f, double a, double b,
                            Tolerance tol = {});
double integrate(const std::function<double(double)>& f, double a, double b,
                 Tolerance tol = {});

// Integral over [a, inf) split into geometric panels [a 2^k, a 2^{k+1}].
// Returns nullopt when the panel contributions stop decaying.
std::optional<double> integrate_to_infinity(const std::function<double(double)>& f, double a,
                                            Tolerance tol = {});

// Golden-section/Brent refinement of a dense sample for the minimum of f on [a, b].
struct Minimum {
  double x;
  double value;
};
Minimum minimize(const std::function<double(double)>& f, double a, double b,
                 int samples = 10000);

// Bisection for a sign change on [a, b]; f(a) and f(b) must differ in sign.
double bisect(const std::function<double(double)>& f, double a, double b, double xtol);

}  // namespace frontforge::quad
