#pragma once

#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "nlfb/kernels.hpp"

namespace nlfb {

/// Principal pair of phi -> d1 [∫_Ω J(x - y) phi(y) dy - phi(x)] on an interval.
struct EigenResult {
  double lambda_p = 0.0;
  Eigen::VectorXd nodes;          ///< positions relative to the left endpoint
  Eigen::VectorXd eigenfunction;  ///< nonnegative, max-norm 1
  int iterations = 0;
  double residual = 0.0;  ///< max |A phi - lambda phi|
  bool dense_fallback = false;
};

struct EigenOptions {
  double rq_tolerance = 1e-10;        ///< on the Rayleigh-quotient increment
  double residual_tolerance = 1e-8;   ///< on max |A phi - lambda phi|
  int max_iterations = 50000;
  Index dense_fallback_below = 600;   ///< node count under which a failed iteration falls back to a dense solve
};

/// Number of nodes and spacing used on an interval of length l.
/// At least four nodes are used, so very short intervals get a finer spacing.
std::pair<Index, double> eigen_grid(double length, double dx);

/// Trapezoid weights on n nodes with spacing h.
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> trapezoid_weights(Index n, Scalar h) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> w = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Constant(n, h);
  if (n > 0) {
    w(0) *= Scalar(0.5);
    w(n - 1) *= Scalar(0.5);
  }
  return w;
}

template <typename Scalar>
struct PowerIterationResult {
  Scalar rho = 0;
  int iterations = 0;
  Scalar residual = 0;
  bool converged = false;
};

/// Power iteration for a nonnegative operator that is self-adjoint in the
/// inner product weighted by w; x is overwritten by the max-normalised
/// Perron vector.
template <typename Scalar, typename MatVec>
PowerIterationResult<Scalar> power_iteration(const MatVec& apply,
                                                     const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& w,
                                                     Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x,
                                                     Scalar rq_tolerance, Scalar residual_tolerance,
                                                     int max_iterations) {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  PowerIterationResult<Scalar> out;
  x /= x.cwiseAbs().maxCoeff();
  Vec y(x.size());
  Scalar previous = -1;
  for (int it = 1; it <= max_iterations; ++it) {
    apply(x, y);
    const Scalar rho = x.cwiseProduct(w).dot(y) / x.cwiseProduct(w).dot(x);
    const Scalar residual = (y - rho * x).cwiseAbs().maxCoeff();
    const Scalar norm = y.cwiseAbs().maxCoeff();
    out.rho = rho;
    out.iterations = it;
    out.residual = residual;
    if (it > 1 && std::abs(rho - previous) <= rq_tolerance && residual <= residual_tolerance) {
      out.converged = true;
      return out;
    }
    previous = rho;
    x = y / norm;
  }
  return out;
}

/// λ_p of the discrete operator A_ij = d1 J(x_i - x_j) w_j - d1 δ_ij on (a, b).
///
/// Iterates on A + d1 I, which is entrywise nonnegative. Only node offsets
/// enter the operator, so the result does not depend on a.
EigenResult principal_eigenvalue(const ValidatedKernel& kernel, double d1, double a, double b, double dx,
                                 const EigenOptions& options = {});

/// λ_p on (0, l) for each requested length, in input order.
std::vector<std::pair<double, double>> eigen_curve(const ValidatedKernel& kernel, double d1,
                                                   std::span<const double> lengths, double dx,
                                                   const EigenOptions& options = {});

}  // namespace nlfb
