#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include <Eigen/Core>

namespace nlfb {

using Index = Eigen::Index;

/// Uniform lattice x_i = (first + i) * dx, i = 0 .. count-1.
///
/// Nodes sit on integer multiples of dx so that windows can grow on either
/// side without moving existing nodes.
struct Grid1d {
  std::int64_t first = 0;
  Index count = 0;
  double dx = 1.0;

  double x(Index i) const { return static_cast<double>(first + i) * dx; }
  double x_min() const { return x(0); }
  double x_max() const { return x(count - 1); }

  /// Index of the node nearest to position, clamped to the grid.
  Index nearest(double position) const {
    const auto j = static_cast<std::int64_t>(std::llround(position / dx)) - first;
    return std::clamp<Index>(j, 0, count - 1);
  }

  bool contains_node(double position, double tol = 1e-9) const {
    const double j = position / dx - static_cast<double>(first);
    return std::abs(j - std::round(j)) <= tol && j > -0.5 && j < static_cast<double>(count) - 0.5;
  }
};

/// Length of the cell [x_i - dx/2, x_i + dx/2] that lies inside [a, b].
inline double cell_overlap(const Grid1d& grid, Index i, double a, double b) {
  const double xi = grid.x(i);
  const double lo = std::max(a, xi - 0.5 * grid.dx);
  const double hi = std::min(b, xi + 0.5 * grid.dx);
  return std::max(0.0, hi - lo);
}

/// cell_overlap / dx, exactly 1 for cells lying fully inside [a, b].
inline double covered_fraction(const Grid1d& grid, Index i, double a, double b) {
  const double xi = grid.x(i);
  const double half = 0.5 * grid.dx;
  if (xi - half >= a && xi + half <= b) return 1.0;
  return cell_overlap(grid, i, a, b) / grid.dx;
}

/// Covered-fraction rule: sum_i f_i |cell_i ∩ [a, b]|.
template <typename Derived>
double integrate(const Grid1d& grid, const Eigen::MatrixBase<Derived>& f, double a, double b) {
  if (!(b > a) || grid.count == 0) return 0.0;
  const double lo = std::floor((a - 0.5 * grid.dx) / grid.dx) - static_cast<double>(grid.first);
  const double hi = std::ceil((b + 0.5 * grid.dx) / grid.dx) - static_cast<double>(grid.first);
  const Index i0 = std::clamp<Index>(static_cast<Index>(lo), 0, grid.count - 1);
  const Index i1 = std::clamp<Index>(static_cast<Index>(hi), 0, grid.count - 1);
  double sum = 0.0;
  for (Index i = i0; i <= i1; ++i) sum += f(i) * cell_overlap(grid, i, a, b);
  return sum;
}

}  // namespace nlfb
