#include "nlfb/eigenvalue.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "nlfb/error.hpp"

namespace nlfb {

std::pair<Index, double> eigen_grid(double length, double dx) {
  const auto cells = static_cast<Index>(std::ceil(length / dx - 1e-9));
  const Index n = std::max<Index>(4, cells + 1);
  return {n, length / static_cast<double>(n - 1)};
}

EigenResult principal_eigenvalue(const ValidatedKernel& kernel, double d1, double a, double b, double dx,
                                 const EigenOptions& options) {
  if (!(b > a)) throw Error(ErrorCode::DegenerateInterval, "interval must satisfy b > a");
  if (!(dx > 0.0)) throw Error(ErrorCode::DegenerateInterval, "dx must be positive");
  if (!(d1 > 0.0)) throw Error(ErrorCode::InvalidArgument, "d1 must be positive");

  const auto [n, h] = eigen_grid(b - a, dx);
  const Eigen::VectorXd w = trapezoid_weights(n, h);

  // Toeplitz band J(m h), m = 0 .. band. A node sitting on the support edge
  // takes the mean of the one-sided limits, except for the corner pair whose
  // offset is the whole interval.
  const double radius = kernel.support_radius();
  Eigen::VectorXd jd(n);
  Index band = 0;
  for (Index m = 0; m < n; ++m) {
    const double offset = static_cast<double>(m) * h;
    if (std::abs(offset - radius) <= 1e-9 * radius) {
      jd(m) = kernel.evaluate(std::nextafter(radius, 0.0));
      if (m < n - 1) jd(m) *= 0.5;
    } else {
      jd(m) = kernel.evaluate(offset);
    }
    if (jd(m) > 0.0) band = m;
  }

  // B = A + d1 I = d1 J W.
  auto apply = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    const Eigen::VectorXd wx = w.cwiseProduct(x);
    for (Index i = 0; i < n; ++i) {
      const Index lo = std::max<Index>(0, i - band);
      const Index hi = std::min<Index>(n - 1, i + band);
      double sum = 0.0;
      for (Index j = lo; j <= hi; ++j) sum += jd(std::abs(i - j)) * wx(j);
      y(i) = d1 * sum;
    }
  };

  EigenResult result;
  result.nodes = Eigen::VectorXd::LinSpaced(n, 0.0, b - a);

  // Even start vector: no overlap with the first odd mode.
  Eigen::VectorXd phi(n);
  for (Index i = 0; i < n; ++i)
    phi(i) = std::sin(std::numbers::pi * static_cast<double>(i + 1) / static_cast<double>(n + 1));

  const auto pi = power_iteration<double>(apply, w, phi, options.rq_tolerance, options.residual_tolerance,
                                          options.max_iterations);
  result.iterations = pi.iterations;

  if (pi.converged) {
    result.lambda_p = pi.rho - d1;
    result.eigenfunction = phi.cwiseMax(0.0);
    result.residual = pi.residual;
    return result;
  }

  if (n >= options.dense_fallback_below) {
    throw Error(ErrorCode::NoConvergence,
                "power iteration hit the iteration cap with residual " + std::to_string(pi.residual));
  }

  // W^{1/2} J W^{1/2} is symmetric and similar to J W.
  Eigen::MatrixXd s(n, n);
  const Eigen::VectorXd sw = w.cwiseSqrt();
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) s(i, j) = d1 * sw(i) * jd(std::abs(i - j)) * sw(j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::NoConvergence, "dense eigensolver failed");
  const double rho = solver.eigenvalues()(n - 1);
  Eigen::VectorXd v = solver.eigenvectors().col(n - 1).cwiseQuotient(sw);
  if (v.sum() < 0.0) v = -v;
  v /= v.cwiseAbs().maxCoeff();
  Eigen::VectorXd y(n);
  apply(v, y);
  result.lambda_p = rho - d1;
  result.eigenfunction = v.cwiseMax(0.0);
  result.residual = (y - rho * v).cwiseAbs().maxCoeff();
  result.dense_fallback = true;
  return result;
}

std::vector<std::pair<double, double>> eigen_curve(const ValidatedKernel& kernel, double d1,
                                                   std::span<const double> lengths, double dx,
                                                   const EigenOptions& options) {
  std::vector<std::pair<double, double>> curve;
  curve.reserve(lengths.size());
  for (double l : lengths) {
    if (!(l > 0.0)) throw Error(ErrorCode::DegenerateInterval, "interval lengths must be positive");
    curve.emplace_back(l, principal_eigenvalue(kernel, d1, 0.0, l, dx, options).lambda_p);
  }
  return curve;
}

}  // namespace nlfb
