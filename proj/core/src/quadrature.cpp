#include "frontforge/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "frontforge/error.hpp"

namespace frontforge::quad {

namespace {

using Rule = boost::math::quadrature::gauss<double, 10>;

struct Panel {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

Panel make_panel(const std::function<double(double)>& f, double a, double b) {
  const double m = 0.5 * (a + b);
  const double whole = Rule::integrate(f, a, b);
  const double halves = Rule::integrate(f, a, m) + Rule::integrate(f, m, b);
  return {a, b, halves, std::abs(whole - halves)};
}

constexpr std::size_t kMaxPanels = 4000;

}  // namespace

Estimate integrate_estimate(const std::function<double(double)>& f, double a, double b,
                            Tolerance tol) {
  if (a == b) return {0.0, 0.0, true};
  if (b < a) {
    Estimate flipped = integrate_estimate(f, b, a, tol);
    flipped.value = -flipped.value;
    return flipped;
  }

  std::priority_queue<Panel> panels;
  Panel first = make_panel(f, a, b);
  double total = first.value;
  double error = first.error;
  panels.push(first);

  while (error > std::max(tol.relative * std::abs(total), tol.absolute) &&
         panels.size() < kMaxPanels) {
    Panel worst = panels.top();
    if (worst.b - worst.a < 1e-15 * std::max(1.0, std::abs(worst.a))) break;
    panels.pop();
    const double m = 0.5 * (worst.a + worst.b);
    Panel left = make_panel(f, worst.a, m);
    Panel right = make_panel(f, m, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
  }
  const bool converged = error <= std::max(tol.relative * std::abs(total), tol.absolute);
  // Re-sum to shed the drift of incremental updates.
  double sum = 0.0;
  double err = 0.0;
  while (!panels.empty()) {
    sum += panels.top().value;
    err += panels.top().error;
    panels.pop();
  }
  return {sum, err, converged};
}

double integrate(const std::function<double(double)>& f, double a, double b, Tolerance tol) {
  return integrate_estimate(f, a, b, tol).value;
}

std::optional<double> integrate_to_infinity(const std::function<double(double)>& f, double a,
                                            Tolerance tol) {
  if (!(a > 0.0)) throw Error(ErrorCode::BadInterval, "semi-infinite integral needs a > 0");
  double sum = 0.0;
  int quiet = 0;
  double lo = a;
  for (int k = 0; k < 400; ++k) {
    const double hi = 2.0 * lo;
    const double piece = integrate(f, lo, hi, tol);
    sum += piece;
    lo = hi;
    if (std::abs(piece) <= 0.01 * tol.relative * std::abs(sum) || std::abs(piece) < 1e-300) {
      if (++quiet >= 4) return sum;
    } else {
      quiet = 0;
    }
    if (!std::isfinite(sum)) return std::nullopt;
  }
  return std::nullopt;
}

Minimum minimize(const std::function<double(double)>& f, double a, double b, int samples) {
  if (!(b > a)) return {a, f(a)};
  samples = std::max(samples, 3);
  const double step = (b - a) / (samples - 1);
  int best = 0;
  double best_value = f(a);
  for (int i = 1; i < samples; ++i) {
    const double v = f(a + i * step);
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  const double lo = a + std::max(best - 1, 0) * step;
  const double hi = a + std::min(best + 1, samples - 1) * step;
  auto refined = boost::math::tools::brent_find_minima(f, lo, hi, 40);
  if (refined.second < best_value) return {refined.first, refined.second};
  return {a + best * step, best_value};
}

double bisect(const std::function<double(double)>& f, double a, double b, double xtol) {
  auto done = [xtol](double lo, double hi) { return std::abs(hi - lo) <= xtol; };
  const auto bracket = boost::math::tools::bisect(f, a, b, done);
  return 0.5 * (bracket.first + bracket.second);
}

}  // namespace frontforge::quad
