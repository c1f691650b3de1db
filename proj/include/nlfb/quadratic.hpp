#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace nlfb {

/// Real roots of a s^2 + b s + c, ascending, a double root reported once.
///
/// Uses q = -(b + sign(b) sqrt(disc)) / 2 with roots q / a and c / q.
/// |a| < linear_tol * max(|b|, |c|) is treated as the linear equation
/// b s + c = 0. A discriminant within rounding of zero
/// (|disc| <= 8 eps b^2) counts as a double root.
template <typename Scalar>
std::vector<Scalar> real_quadratic_roots(Scalar a, Scalar b, Scalar c, Scalar linear_tol = Scalar(1e-12)) {
  std::vector<Scalar> roots;
  const Scalar scale = std::max(std::abs(b), std::abs(c));
  if (std::abs(a) < linear_tol * scale || a == Scalar(0)) {
    if (b != Scalar(0)) roots.push_back(-c / b);
    return roots;
  }
  const Scalar disc = b * b - Scalar(4) * a * c;
  const Scalar rounding = Scalar(8) * std::numeric_limits<Scalar>::epsilon() * b * b;
  if (disc < -rounding) return roots;
  if (std::abs(disc) <= rounding) {
    roots.push_back(-b / (Scalar(2) * a));
    return roots;
  }
  const Scalar sq = std::sqrt(disc);
  const Scalar q = Scalar(-0.5) * (b + std::copysign(sq, b));
  Scalar r1 = q / a;
  Scalar r2 = c / q;
  if (r1 > r2) std::swap(r1, r2);
  roots.push_back(r1);
  if (r2 != r1) roots.push_back(r2);
  return roots;
}

}  // namespace nlfb
