#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "nlfb/grid.hpp"

namespace nlfb {

enum class KernelForm { Uniform, Triangular, TruncatedGaussian, Tabulated };

std::string to_string(KernelForm form);
KernelForm kernel_form_from_string(const std::string& name);

/// Description of a dispersal kernel before validation.
struct KernelSpec {
  KernelForm form = KernelForm::Uniform;
  double support = 1.0;  ///< declared support radius L0 (closed forms)
  double sigma = 0.5;    ///< standard deviation before truncation (truncated-gaussian)
  std::vector<double> table_x;        ///< tabulated: strictly increasing positions
  std::vector<double> table_density;  ///< tabulated: densities at table_x

  static KernelSpec uniform(double support);
  static KernelSpec triangular(double support);
  static KernelSpec truncated_gaussian(double sigma, double support);
  static KernelSpec tabulated(std::vector<double> x, std::vector<double> density);
};

/// Reads a two-column (x, density) whitespace separated table.
KernelSpec read_kernel_table(const std::string& path);

/// An even, nonnegative, unit-mass kernel with finite support.
///
/// Closed forms are evaluated exactly. Tabulated kernels are linearly
/// interpolated, symmetrised as (J(x) + J(-x)) / 2 and scaled to unit
/// trapezoid mass; the applied scale is kept in renormalization().
class ValidatedKernel {
public:
  double evaluate(double x) const;
  double operator()(double x) const { return evaluate(x); }

  /// Cumulative mass K(s) = ∫_{-∞}^{s} J.
  double cdf(double s) const;

  double support_radius() const { return support_radius_; }
  double peak() const { return evaluate(0.0); }
  double renormalization() const { return renormalization_; }
  double raw_mass() const { return raw_mass_; }
  double unit_mass_tolerance() const { return unit_mass_tolerance_; }
  const KernelSpec& spec() const { return spec_; }

private:
  friend ValidatedKernel validate_kernel(const KernelSpec& spec, double grid_resolution);

  double raw_interp(double x) const;
  double raw_primitive(double s) const;

  KernelSpec spec_;
  double support_radius_ = 0.0;
  double renormalization_ = 1.0;
  double raw_mass_ = 1.0;
  double unit_mass_tolerance_ = 1e-14;
  double gauss_norm_ = 1.0;              // truncated-gaussian: erf(L0 / (sigma sqrt 2))
  std::vector<double> table_primitive_;  // tabulated: ∫_{x_0}^{x_i} of the raw interpolant
};

/// Checks evenness, nonnegativity, J(0) > 0 and positive mass on the probe
/// grid x = i * grid_resolution and returns the usable kernel.
ValidatedKernel validate_kernel(const KernelSpec& spec, double grid_resolution);

/// ∫_{-∞}^{s} J, clamped to {0, 1} outside the support.
double kernel_cdf(const ValidatedKernel& kernel, double s);

/// Cell-integrated kernel weights w_k = ∫_{(k-1/2)dx}^{(k+1/2)dx} J for |k| <= radius.
///
/// Weights below density_floor * (largest weight) at the ends are dropped.
/// For a piecewise-constant kernel the weight of a cell cut by the support
/// edge is the covered fraction times the density, so the discrete
/// convolution of a constant is exact.
class Stencil {
public:
  Stencil() = default;
  Stencil(const ValidatedKernel& kernel, double dx, double density_floor = 1e-12);

  Index radius() const { return radius_; }
  double dx() const { return dx_; }
  double operator[](Index offset) const { return weights_[offset + radius_]; }
  const Eigen::VectorXd& weights() const { return weights_; }

private:
  Index radius_ = 0;
  double dx_ = 0.0;
  Eigen::VectorXd weights_;
};

/// ∫_{support} J(x - y) f(y) dy for a field sampled on grid.
///
/// Cells of the field are weighted by the fraction covered by support, so
/// nodes outside support do not contribute. x must be a node of grid.
double convolve(const ValidatedKernel& kernel, const Grid1d& grid, std::span<const double> field,
                double support_lo, double support_hi, double x);

/// Stencil form used by the simulator: out_i = sum_k w_k padded[i + R - k]
/// where padded holds the cell-weighted field with R extra entries per side.
void convolve_padded(const Stencil& stencil, std::span<const double> padded, Index first, Index last,
                     std::span<double> out);

}  // namespace nlfb
