#include "nlfb/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "nlfb/error.hpp"

namespace nlfb {

namespace {

constexpr double kSymmetryTolerance = 1e-9;  // relative to peak density

double clamp_unit(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

std::string to_string(KernelForm form) {
  switch (form) {
    case KernelForm::Uniform: return "uniform";
    case KernelForm::Triangular: return "triangular";
    case KernelForm::TruncatedGaussian: return "truncated-gaussian";
    case KernelForm::Tabulated: return "tabulated";
  }
  return "unknown";
}

KernelForm kernel_form_from_string(const std::string& name) {
  if (name == "uniform") return KernelForm::Uniform;
  if (name == "triangular") return KernelForm::Triangular;
  if (name == "truncated-gaussian") return KernelForm::TruncatedGaussian;
  if (name == "tabulated") return KernelForm::Tabulated;
  throw Error(ErrorCode::InvalidArgument, "unknown kernel form '" + name + "'");
}

KernelSpec KernelSpec::uniform(double support) {
  KernelSpec s;
  s.form = KernelForm::Uniform;
  s.support = support;
  return s;
}

KernelSpec KernelSpec::triangular(double support) {
  KernelSpec s;
  s.form = KernelForm::Triangular;
  s.support = support;
  return s;
}

KernelSpec KernelSpec::truncated_gaussian(double sigma, double support) {
  KernelSpec s;
  s.form = KernelForm::TruncatedGaussian;
  s.sigma = sigma;
  s.support = support;
  return s;
}

KernelSpec KernelSpec::tabulated(std::vector<double> x, std::vector<double> density) {
  KernelSpec s;
  s.form = KernelForm::Tabulated;
  s.table_x = std::move(x);
  s.table_density = std::move(density);
  return s;
}

KernelSpec read_kernel_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open kernel table '" + path + "'");
  std::vector<double> xs, ds;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    double x = 0.0, d = 0.0;
    if (!(row >> x)) continue;
    if (!(row >> d)) throw Error(ErrorCode::InvalidArgument, "kernel table row without density: " + line);
    xs.push_back(x);
    ds.push_back(d);
  }
  return KernelSpec::tabulated(std::move(xs), std::move(ds));
}

double ValidatedKernel::raw_interp(double x) const {
  const auto& xs = spec_.table_x;
  const auto& ds = spec_.table_density;
  if (x < xs.front() || x > xs.back()) return 0.0;
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  if (it == xs.end()) return ds.back();
  const auto i = static_cast<std::size_t>(it - xs.begin()) - 1;
  const double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
  return ds[i] + t * (ds[i + 1] - ds[i]);
}

double ValidatedKernel::raw_primitive(double s) const {
  const auto& xs = spec_.table_x;
  const auto& ds = spec_.table_density;
  if (s <= xs.front()) return 0.0;
  if (s >= xs.back()) return table_primitive_.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), s);
  const auto i = static_cast<std::size_t>(it - xs.begin()) - 1;
  const double seg = xs[i + 1] - xs[i];
  const double t = s - xs[i];
  return table_primitive_[i] + ds[i] * t + (ds[i + 1] - ds[i]) * t * t / (2.0 * seg);
}

double ValidatedKernel::evaluate(double x) const {
  const double L = spec_.support;
  switch (spec_.form) {
    case KernelForm::Uniform:
      return std::abs(x) <= L ? 0.5 / L : 0.0;
    case KernelForm::Triangular:
      return std::abs(x) < L ? (L - std::abs(x)) / (L * L) : 0.0;
    case KernelForm::TruncatedGaussian: {
      if (std::abs(x) > L) return 0.0;
      const double s = spec_.sigma;
      return std::exp(-0.5 * x * x / (s * s)) / (s * std::sqrt(2.0 * std::numbers::pi) * gauss_norm_);
    }
    case KernelForm::Tabulated:
      return renormalization_ * 0.5 * (raw_interp(x) + raw_interp(-x));
  }
  return 0.0;
}

double ValidatedKernel::cdf(double s) const {
  const double L = spec_.support;
  switch (spec_.form) {
    case KernelForm::Uniform:
      return clamp_unit((s + L) / (2.0 * L));
    case KernelForm::Triangular:
      if (s <= -L) return 0.0;
      if (s >= L) return 1.0;
      if (s <= 0.0) return (L + s) * (L + s) / (2.0 * L * L);
      return 1.0 - (L - s) * (L - s) / (2.0 * L * L);
    case KernelForm::TruncatedGaussian:
      if (s <= -L) return 0.0;
      if (s >= L) return 1.0;
      return clamp_unit(0.5 + 0.5 * std::erf(s / (spec_.sigma * std::numbers::sqrt2)) / gauss_norm_);
    case KernelForm::Tabulated: {
      const double total = table_primitive_.back();
      return clamp_unit((raw_primitive(s) + total - raw_primitive(-s)) / (2.0 * total));
    }
  }
  return 0.0;
}

ValidatedKernel validate_kernel(const KernelSpec& spec, double grid_resolution) {
  if (!(grid_resolution > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid_resolution must be positive");

  ValidatedKernel k;
  k.spec_ = spec;

  if (spec.form == KernelForm::Tabulated) {
    const auto& xs = spec.table_x;
    const auto& ds = spec.table_density;
    if (xs.size() < 2 || xs.size() != ds.size())
      throw Error(ErrorCode::InvalidArgument, "tabulated kernel needs at least two (x, density) rows");
    for (std::size_t i = 1; i < xs.size(); ++i)
      if (!(xs[i] > xs[i - 1])) throw Error(ErrorCode::InvalidArgument, "kernel table x must be strictly increasing");
    for (double d : ds)
      if (d < 0.0) throw Error(ErrorCode::NegativeDensity, "kernel table has a negative density");

    k.table_primitive_.assign(xs.size(), 0.0);
    for (std::size_t i = 1; i < xs.size(); ++i)
      k.table_primitive_[i] = k.table_primitive_[i - 1] + 0.5 * (ds[i] + ds[i - 1]) * (xs[i] - xs[i - 1]);
    k.raw_mass_ = k.table_primitive_.back();
    if (!(k.raw_mass_ > 0.0)) throw Error(ErrorCode::ZeroMass, "kernel table has zero mass");

    const double peak = *std::max_element(ds.begin(), ds.end());
    auto check_symmetric = [&](double x) {
      if (std::abs(k.raw_interp(x) - k.raw_interp(-x)) > kSymmetryTolerance * peak) {
        std::ostringstream msg;
        msg << "J(" << x << ") != J(" << -x << ")";
        throw Error(ErrorCode::Asymmetric, msg.str());
      }
    };
    for (double x : xs) check_symmetric(x);
    k.support_radius_ = std::max(std::abs(xs.front()), std::abs(xs.back()));
    for (double x = 0.0; x <= k.support_radius_; x += grid_resolution) check_symmetric(x);

    if (!(k.raw_interp(0.0) > 0.0)) throw Error(ErrorCode::ZeroAtOrigin, "J(0) must be positive");
    k.renormalization_ = 1.0 / k.raw_mass_;
    k.spec_.support = k.support_radius_;
    k.unit_mass_tolerance_ = 1e-12;
  } else {
    if (!(spec.support > 0.0)) throw Error(ErrorCode::InvalidArgument, "kernel support radius must be positive");
    if (spec.form == KernelForm::TruncatedGaussian) {
      if (!(spec.sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "kernel sigma must be positive");
      k.gauss_norm_ = std::erf(spec.support / (spec.sigma * std::numbers::sqrt2));
    }
    k.support_radius_ = spec.support;
    k.unit_mass_tolerance_ = 1e-14;
  }

  // Evenness and sign on the probe grid.
  for (double x = 0.0; x <= k.support_radius_ + grid_resolution; x += grid_resolution) {
    const double a = k.evaluate(x), b = k.evaluate(-x);
    if (a < 0.0 || b < 0.0) throw Error(ErrorCode::NegativeDensity, "kernel density is negative");
    if (a != b) throw Error(ErrorCode::Asymmetric, "kernel is not even on the probe grid");
  }
  if (!(k.evaluate(0.0) > 0.0)) throw Error(ErrorCode::ZeroAtOrigin, "J(0) must be positive");
  const double mass = k.cdf(k.support_radius_) - k.cdf(-k.support_radius_);
  if (!(mass > 0.0)) throw Error(ErrorCode::ZeroMass, "kernel has zero mass");
  return k;
}

double kernel_cdf(const ValidatedKernel& kernel, double s) { return kernel.cdf(s); }

Stencil::Stencil(const ValidatedKernel& kernel, double dx, double density_floor) : dx_(dx) {
  if (!(dx > 0.0)) throw Error(ErrorCode::InvalidArgument, "stencil spacing must be positive");
  const auto kmax = static_cast<Index>(std::ceil(kernel.support_radius() / dx + 0.5));
  Eigen::VectorXd half(kmax + 1);
  for (Index k = 0; k <= kmax; ++k) {
    const double c = static_cast<double>(k) * dx;
    half(k) = kernel.cdf(c + 0.5 * dx) - kernel.cdf(c - 0.5 * dx);
  }
  const double cutoff = density_floor * half.maxCoeff();
  radius_ = kmax;
  while (radius_ > 0 && half(radius_) < cutoff) --radius_;

  weights_.resize(2 * radius_ + 1);
  for (Index k = 0; k <= radius_; ++k) {
    weights_(radius_ + k) = half(k);
    weights_(radius_ - k) = half(k);
  }
}

double convolve(const ValidatedKernel& kernel, const Grid1d& grid, std::span<const double> field,
                double support_lo, double support_hi, double x) {
  if (static_cast<Index>(field.size()) != grid.count)
    throw Error(ErrorCode::GridMismatch, "field size does not match grid");
  if (!grid.contains_node(x)) throw Error(ErrorCode::GridMismatch, "x is not a node of the grid");

  const Stencil stencil(kernel, grid.dx);
  const Index i = grid.nearest(x);
  double sum = 0.0;
  for (Index k = -stencil.radius(); k <= stencil.radius(); ++k) {
    const Index j = i - k;
    if (j < 0 || j >= grid.count) continue;
    const double frac = covered_fraction(grid, j, support_lo, support_hi);
    if (frac > 0.0) sum += stencil[k] * frac * field[static_cast<std::size_t>(j)];
  }
  return sum;
}

void convolve_padded(const Stencil& stencil, std::span<const double> padded, Index first, Index last,
                     std::span<double> out) {
  const Eigen::VectorXd& w = stencil.weights();
  const Index width = w.size();
  for (Index i = first; i < last; ++i)
    out[static_cast<std::size_t>(i)] = Eigen::Map<const Eigen::VectorXd>(padded.data() + i, width).dot(w);
}

}  // namespace nlfb
