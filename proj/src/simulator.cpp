#include "nlfb/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nlfb/diagnostics.hpp"
#include "nlfb/error.hpp"

namespace nlfb {

namespace {

constexpr double kNegativeFloor = -1e-12;

double interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double x, bool hold_edges) {
  if (x <= xs.front()) return hold_edges || x == xs.front() ? ys.front() : 0.0;
  if (x >= xs.back()) return hold_edges || x == xs.back() ? ys.back() : 0.0;
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const auto i = static_cast<std::size_t>(it - xs.begin()) - 1;
  const double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
  return ys[i] + t * (ys[i + 1] - ys[i]);
}

void check_table(const TabulatedProfile& p, ErrorCode code) {
  if (p.x.size() < 2 || p.x.size() != p.value.size())
    throw Error(code, "profile table needs at least two (x, value) rows");
  for (std::size_t i = 1; i < p.x.size(); ++i)
    if (!(p.x[i] > p.x[i - 1])) throw Error(code, "profile table x must be strictly increasing");
  for (double v : p.value)
    if (v < 0.0 || !std::isfinite(v)) throw Error(code, "profile table has a negative entry");
}

/// Nodes strictly inside (lo, hi) as a half-open index range.
std::pair<Index, Index> interior_range(const Grid1d& grid, double lo, double hi) {
  Index first = static_cast<Index>(std::floor(lo / grid.dx)) - grid.first;
  while (first < grid.count && (first < 0 || grid.x(first) <= lo)) ++first;
  Index last = static_cast<Index>(std::ceil(hi / grid.dx)) - grid.first;
  while (last >= 0 && (last >= grid.count || grid.x(last) >= hi)) --last;
  first = std::clamp<Index>(first, 0, grid.count);
  return {first, std::max(first, last + 1)};
}

/// Grows the window (doubling on the side that triggers) until both fronts
/// are at least 2 L0_max away from the edges.
void ensure_window(SimState& s, double g, double h) {
  const double margin = 2.0 * s.max_support_radius();
  while (g - margin < s.grid.x_min() || h + margin > s.grid.x_max()) {
    const bool left = g - margin < s.grid.x_min();
    const bool right = h + margin > s.grid.x_max();
    const Index grow = s.grid.count;
    const Index add_left = left ? grow : 0;
    const Index add_right = right ? grow : 0;
    const Index n = s.grid.count + add_left + add_right;

    Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd v(n);
    u.segment(add_left, s.grid.count) = s.u;
    v.segment(add_left, s.grid.count) = s.v;
    v.head(add_left).setConstant(s.v(0));
    v.tail(add_right).setConstant(s.v(s.grid.count - 1));

    s.grid.first -= add_left;
    s.grid.count = n;
    s.u = std::move(u);
    s.v = std::move(v);
    ++s.audit.window_expansions;
  }
}

/// Kernel-mass-weighted spread of v within one stencil radius of each edge.
double edge_leakage(const SimState& s) {
  const Index r = std::min<Index>(s.s2->radius(), s.grid.count - 1);
  const auto spread = [](const auto& seg) { return seg.maxCoeff() - seg.minCoeff(); };
  return 0.5 * std::max(spread(s.v.head(r + 1)), spread(s.v.tail(r + 1)));
}

/// Rates on a state whose window already covers the new fronts.
/// u_t is filled on [u_first, u_last); v_t everywhere.
void compute_rates(const SimState& s, Index u_first, Index u_last, Eigen::VectorXd& u_t, Eigen::VectorXd& v_t) {
  const GeneralParams& c = s.coeffs;
  const Index n = s.grid.count;

  const Index r1 = s.s1->radius();
  std::vector<double> pu(static_cast<std::size_t>(n + 2 * r1), 0.0);
  const auto [sup_first, sup_last] = interior_range(s.grid, s.g_front, s.h_front);
  for (Index j = sup_first; j < sup_last; ++j)
    pu[static_cast<std::size_t>(j + r1)] = s.u(j) * covered_fraction(s.grid, j, s.g_front, s.h_front);

  const Index r2 = s.s2->radius();
  std::vector<double> pv(static_cast<std::size_t>(n + 2 * r2));
  for (Index p = 0; p < n + 2 * r2; ++p) pv[static_cast<std::size_t>(p)] = s.v(std::clamp<Index>(p - r2, 0, n - 1));

  u_t = Eigen::VectorXd::Zero(n);
  v_t.resize(n);
  convolve_padded(*s.s1, pu, u_first, u_last, std::span<double>(u_t.data(), static_cast<std::size_t>(n)));
  convolve_padded(*s.s2, pv, 0, n, std::span<double>(v_t.data(), static_cast<std::size_t>(n)));

  for (Index i = u_first; i < u_last; ++i) {
    const double u = s.u(i);
    u_t(i) = c.D1 * (u_t(i) - u) + u * (c.a1 - c.b1 * u - c.c1 * s.v(i));
  }
  for (Index i = 0; i < n; ++i) {
    const double v = s.v(i);
    v_t(i) = c.D2 * (v_t(i) - v) + v * (c.a2 - c.b2 * v - c.c2 * s.u(i));
  }
}

void settle(double& value, double cap, long& clamps, const char* field, double x) {
  if (value < 0.0) {
    if (value < kNegativeFloor) {
      std::ostringstream msg;
      msg << field << " = " << value << " at x = " << x;
      throw Error(ErrorCode::StabilityViolated, msg.str());
    }
    value = 0.0;
    ++clamps;
  }
  if (!(value <= cap)) {
    std::ostringstream msg;
    msg << field << " = " << value << " exceeds " << cap << " at x = " << x;
    throw Error(ErrorCode::StabilityViolated, msg.str());
  }
}

SimState init_common(const GeneralParams& c, const ValidatedKernel& j1, const ValidatedKernel& j2,
                     const Profile& u0, const Profile& v0, double dx, double window_pad) {
  if (!(dx > 0.0)) throw Error(ErrorCode::InvalidArgument, "dx must be positive");
  if (!(window_pad >= 0.0)) throw Error(ErrorCode::InvalidArgument, "window_pad must be nonnegative");
  const double h0 = c.H0;

  SimState s;
  s.coeffs = c;
  s.g_front = -h0;
  s.h_front = h0;
  s.j1 = std::make_shared<const ValidatedKernel>(j1);
  s.j2 = std::make_shared<const ValidatedKernel>(j2);
  s.s1 = std::make_shared<const Stencil>(j1, dx);
  s.s2 = std::make_shared<const Stencil>(j2, dx);

  const auto lo = static_cast<std::int64_t>(std::floor((-h0 - window_pad) / dx));
  const auto hi = static_cast<std::int64_t>(std::ceil((h0 + window_pad) / dx));
  s.grid = Grid1d{lo, static_cast<Index>(hi - lo + 1), dx};
  s.u = Eigen::VectorXd::Zero(s.grid.count);
  s.v = Eigen::VectorXd::Zero(s.grid.count);

  // u0: positive on (-h0, h0), zero elsewhere.
  if (const auto* bump = std::get_if<CosineBump>(&u0)) {
    if (!(bump->u_max > 0.0)) throw Error(ErrorCode::InvalidInitialU, "cosine bump needs u_max > 0");
    const auto [a, b] = interior_range(s.grid, -h0, h0);
    for (Index i = a; i < b; ++i) s.u(i) = bump->u_max * std::cos(std::numbers::pi * s.grid.x(i) / (2.0 * h0));
  } else if (const auto* table = std::get_if<TabulatedProfile>(&u0)) {
    check_table(*table, ErrorCode::InvalidInitialU);
    for (std::size_t i = 0; i < table->x.size(); ++i)
      if (std::abs(table->x[i]) >= h0 && table->value[i] > 0.0)
        throw Error(ErrorCode::InvalidInitialU, "u0 must vanish for |x| >= h0");
    const auto [a, b] = interior_range(s.grid, -h0, h0);
    for (Index i = a; i < b; ++i) s.u(i) = interpolate(table->x, table->value, s.grid.x(i), false);
  } else {
    throw Error(ErrorCode::InvalidInitialU, "u0 must vanish for |x| >= h0; a constant profile cannot");
  }
  {
    const auto [a, b] = interior_range(s.grid, -h0, h0);
    for (Index i = a; i < b; ++i)
      if (!(s.u(i) > 0.0)) throw Error(ErrorCode::InvalidInitialU, "u0 must be positive on (-h0, h0)");
  }

  if (const auto* cst = std::get_if<ConstantProfile>(&v0)) {
    if (!(cst->value >= 0.0)) throw Error(ErrorCode::InvalidInitialV, "v0 must be nonnegative");
    s.v.setConstant(cst->value);
  } else if (const auto* table = std::get_if<TabulatedProfile>(&v0)) {
    check_table(*table, ErrorCode::InvalidInitialV);
    for (Index i = 0; i < s.grid.count; ++i) s.v(i) = interpolate(table->x, table->value, s.grid.x(i), true);
  } else {
    const auto& bump = std::get<CosineBump>(v0);
    if (!(bump.u_max >= 0.0)) throw Error(ErrorCode::InvalidInitialV, "v0 must be nonnegative");
    const auto [a, b] = interior_range(s.grid, -h0, h0);
    for (Index i = a; i < b; ++i) s.v(i) = bump.u_max * std::cos(std::numbers::pi * s.grid.x(i) / (2.0 * h0));
  }

  s.u_cap = 10.0 * std::max({1.0, c.a1 / c.b1, s.u.maxCoeff()});
  s.v_cap = 10.0 * std::max({1.0, c.a2 / c.b2, s.v.maxCoeff()});
  ensure_window(s, s.g_front, s.h_front);
  s.audit.window_expansions = 0;
  return s;
}

}  // namespace

GeneralParams GeneralParams::from_reduced(const ModelParams& p) {
  GeneralParams g;
  g.D1 = p.d1;
  g.D2 = p.d2;
  g.a1 = 1.0;
  g.b1 = 1.0;
  g.c1 = p.k;
  g.a2 = p.gamma;
  g.b2 = p.gamma;
  g.c2 = p.gamma * p.h_comp;
  g.mu_hat = p.mu;
  g.H0 = p.h0;
  return g;
}

std::pair<ModelParams, ScalingTransform> reduce_general(const GeneralParams& g) {
  for (double value : {g.D1, g.D2, g.a1, g.b1, g.c1, g.a2, g.b2, g.c2, g.mu_hat, g.H0})
    if (!(value > 0.0) || !std::isfinite(value))
      throw Error(ErrorCode::NonPositiveParameter, "all unreduced coefficients must be positive");
  ModelParams p;
  p.d1 = g.D1 / g.a1;
  p.d2 = g.D2 / g.a1;
  p.gamma = g.a2 / g.a1;
  p.k = g.a2 * g.c1 / (g.a1 * g.b2);
  p.h_comp = g.a1 * g.c2 / (g.a2 * g.b1);
  p.mu = g.mu_hat / g.b1;
  p.h0 = g.H0;
  ScalingTransform tr;
  tr.u_scale = g.b1 / g.a1;
  tr.v_scale = g.b2 / g.a2;
  tr.time_scale = g.a1;
  return {p, tr};
}

double stable_dt(const ModelParams& p) {
  return 0.2 / (p.d1 + p.d2 + p.gamma * (1.0 + p.h_comp + 2.0) + (1.0 + p.k + 2.0));
}

double stable_dt(const GeneralParams& g) { return stable_dt(reduce_general(g).first) / g.a1; }

Eigen::Vector2d SimState::at(double x) const {
  const Index i = grid.nearest(x);
  return {u(i), v(i)};
}

SimState init_state(const ModelParams& params, const ValidatedKernel& j1, const ValidatedKernel& j2,
                    const Profile& u0, const Profile& v0, double dx, double window_pad) {
  params.validate();
  return init_common(GeneralParams::from_reduced(params), j1, j2, u0, v0, dx, window_pad);
}

SimState init_state(const GeneralParams& general, const ValidatedKernel& j1, const ValidatedKernel& j2,
                    const Profile& u0, const Profile& v0, double dx, double window_pad) {
  reduce_general(general);
  return init_common(general, j1, j2, u0, v0, dx, window_pad);
}

std::pair<double, double> front_speeds(const SimState& s) {
  const auto [first, last] = interior_range(s.grid, s.g_front, s.h_front);
  double right = 0.0, left = 0.0;
  for (Index j = first; j < last; ++j) {
    const double uj = s.u(j);
    if (uj == 0.0) continue;
    const double x = s.grid.x(j);
    const double w = uj * cell_overlap(s.grid, j, s.g_front, s.h_front);
    right += w * s.j1->cdf(x - s.h_front);
    left += w * s.j1->cdf(s.g_front - x);
  }
  return {-s.coeffs.mu_hat * left, s.coeffs.mu_hat * right};
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> field_rates(const SimState& s) {
  const auto [first, last] = interior_range(s.grid, s.g_front, s.h_front);
  Eigen::VectorXd u_t, v_t;
  compute_rates(s, first, last, u_t, v_t);
  return {u_t, v_t};
}

SimState step(const SimState& state, double dt) {
  const auto [g_rate, h_rate] = front_speeds(state);
  const double g_new = state.g_front + dt * g_rate;
  const double h_new = state.h_front + dt * h_rate;

  SimState next = state;
  ensure_window(next, g_new, h_new);

  const auto [first, last] = interior_range(next.grid, g_new, h_new);
  Eigen::VectorXd u_t, v_t;
  compute_rates(next, first, last, u_t, v_t);

  Eigen::VectorXd u = Eigen::VectorXd::Zero(next.grid.count);
  u.segment(first, last - first) = next.u.segment(first, last - first) + dt * u_t.segment(first, last - first);
  Eigen::VectorXd v = next.v + dt * v_t;

  for (Index i = first; i < last; ++i) settle(u(i), next.u_cap, next.audit.clamp_count, "u", next.grid.x(i));
  for (Index i = 0; i < next.grid.count; ++i) settle(v(i), next.v_cap, next.audit.clamp_count, "v", next.grid.x(i));

  next.u = std::move(u);
  next.v = std::move(v);
  next.g_front = g_new;
  next.h_front = h_new;
  next.t = state.t + dt;
  next.audit.max_leakage = std::max(next.audit.max_leakage, edge_leakage(next));
  return next;
}

RunResult run(SimState state, const RunOptions& options, const FieldObserver& observer) {
  if (!(options.T >= 0.0)) throw Error(ErrorCode::InvalidArgument, "T must be nonnegative");
  if (!(options.dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  if (!(options.snapshot_every > 0.0)) throw Error(ErrorCode::InvalidArgument, "snapshot_every must be positive");

  const auto steps = static_cast<long>(std::ceil(options.T / options.dt - 1e-9));
  const long sample_stride = std::max(1L, std::lround(options.snapshot_every / options.dt));
  const long field_stride = options.field_every > 0.0 ? std::max(1L, std::lround(options.field_every / options.dt)) : 0L;

  RunResult result;
  const double t0 = state.t;
  auto sample = [&](const SimState& s) {
    const Metrics m = metrics(s, options.metrics_half_width);
    result.series.t.push_back(s.t);
    result.series.g_front.push_back(s.g_front);
    result.series.h_front.push_back(s.h_front);
    result.series.mass_u.push_back(m.mass_u);
    result.series.sup_u.push_back(m.sup_u);
    result.series.v_dev.push_back(m.v_dev);
    result.series.sup_v.push_back(m.sup_v);
  };

  sample(state);
  if (observer) observer(state);

  for (long n = 1; n <= steps; ++n) {
    const double target = t0 + static_cast<double>(n) * options.dt;
    const double h = n == steps ? (t0 + options.T) - state.t : target - state.t;
    SimState next;
    try {
      next = step(state, h);
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << e.message() << " (step ending at t = " << state.t + h << ")";
      throw Error(e.code(), msg.str());
    }
    if (next.h_front < state.h_front || next.g_front > state.g_front) result.front_monotone = false;
    {
      const auto [a, b] = interior_range(next.grid, next.g_front, next.h_front);
      if ((next.u.head(a).array() != 0.0).any() || (next.u.tail(next.grid.count - b).array() != 0.0).any())
        result.support_discipline = false;
    }
    state = std::move(next);
    if (n % sample_stride == 0 || n == steps) sample(state);
    if (observer && field_stride > 0 && n % field_stride == 0 && n != steps) observer(state);
  }
  if (observer && steps > 0) observer(state);

  result.final_state = std::move(state);
  return result;
}

}  // namespace nlfb
