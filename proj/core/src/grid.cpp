#include "frontforge/grid.hpp"

#include <cmath>

#include "frontforge/error.hpp"

namespace frontforge {

Grid::Grid(double half_length, int nodes) : half_length_(half_length), nodes_(nodes) {
  if (!(half_length > 0.0)) throw Error(ErrorCode::InvalidGrid, "half length must be positive");
  if (nodes < 3 || nodes % 2 == 0) throw Error(ErrorCode::InvalidGrid, "node count must be odd and >= 3");
  spacing_ = 2.0 * half_length / (nodes - 1);
}

std::vector<double> Grid::coordinates() const {
  std::vector<double> xs(static_cast<std::size_t>(nodes_));
  for (int i = 0; i < nodes_; ++i) xs[static_cast<std::size_t>(i)] = x(i);
  return xs;
}

Profile::Profile(Grid g, std::vector<double> v, double left, double right)
    : grid(g), values(std::move(v)), left_state(left), right_state(right) {
  if (static_cast<int>(values.size()) != grid.nodes())
    throw Error(ErrorCode::InvalidGrid, "profile length does not match grid");
}

double Profile::interpolate(double x) const {
  const double t = (x + grid.half_length()) / grid.spacing();
  const double fl = std::floor(t);
  const long i = static_cast<long>(fl);
  const double w = t - fl;
  return (1.0 - w) * extended(i) + w * extended(i + 1);
}

}  // namespace frontforge
