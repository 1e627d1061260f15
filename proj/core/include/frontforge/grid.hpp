#pragma once

#include <vector>

namespace frontforge {

// Uniform grid on [-L, L] with an odd node count, so node (N-1)/2 sits at x = 0.
class Grid {
 public:
  Grid(double half_length, int nodes);

  double half_length() const { return half_length_; }
  int nodes() const { return nodes_; }
  double spacing() const { return spacing_; }
  int center() const { return (nodes_ - 1) / 2; }
  double x(int i) const { return -half_length_ + i * spacing_; }
  std::vector<double> coordinates() const;

  bool operator==(const Grid& other) const {
    return half_length_ == other.half_length_ && nodes_ == other.nodes_;
  }

 private:
  double half_length_;
  int nodes_;
  double spacing_;
};

// Grid function extended by constant far-field states beyond both ends.
struct Profile {
  Grid grid;
  std::vector<double> values;
  double left_state = 1.0;
  double right_state = 0.0;

  Profile(Grid g, std::vector<double> v, double left, double right);

  int size() const { return grid.nodes(); }
  double operator[](int i) const { return values[static_cast<std::size_t>(i)]; }
  // Value at node index i, using the far-field states off the grid.
  double extended(long i) const {
    if (i < 0) return left_state;
    if (i >= grid.nodes()) return right_state;
    return values[static_cast<std::size_t>(i)];
  }
  double at_center() const { return (*this)[grid.center()]; }
  // Piecewise-linear interpolation with far-field extension.
  double interpolate(double x) const;
};

}  // namespace frontforge
