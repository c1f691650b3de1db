#include "nlfb/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nlfb/eigenvalue.hpp"
#include "nlfb/error.hpp"

namespace nlfb {

std::string to_string(Regime r) {
  switch (r) {
    case Regime::Vanishing: return "vanishing";
    case Regime::Spreading: return "spreading";
    case Regime::Undecided: return "undecided";
  }
  return "unknown";
}

Metrics metrics(const SimState& s, double L) {
  if (!(L > 0.0)) throw Error(ErrorCode::InvalidArgument, "metrics half-width must be positive");
  if (-L < s.grid.x_min() || L > s.grid.x_max())
    throw Error(ErrorCode::WindowTooSmall, "[-L, L] is not inside the grid window");
  Metrics m;
  m.half_width = L;
  m.mass_u = integrate(s.grid, s.u, s.g_front, s.h_front);
  m.sup_u = s.u.maxCoeff();
  m.v_dev = integrate(s.grid, (s.v.array() - 1.0).abs().matrix(), -L, L);
  m.sup_v = s.v.maxCoeff();
  return m;
}

double windowed_mass_u(const SimState& s, double x, double L) { return integrate(s.grid, s.u, x - L, x + L); }

double windowed_mean_v(const SimState& s, double x, double L) {
  return integrate(s.grid, s.v, x - L, x + L) / (2.0 * L);
}

RegimeReport detect_regime(const TimeSeries& series, double T_max, const DetectOptions& options) {
  const std::size_t n = series.size();
  if (n < 10) throw Error(ErrorCode::SeriesTooShort, "regime detection needs at least 10 samples");
  const double slack = 1e-9 * std::max(1.0, T_max);
  if (series.t.back() < T_max - slack) throw Error(ErrorCode::InvalidArgument, "series does not reach T_max");

  const double t_start = T_max * (1.0 - options.trailing_fraction);
  std::size_t i0 = 0;
  while (i0 < n && series.t[i0] < t_start - slack) ++i0;
  std::size_t i1 = n - 1;
  while (i1 > 0 && series.t[i1] > T_max + slack) --i1;
  if (i0 >= i1) throw Error(ErrorCode::SeriesTooShort, "trailing window holds fewer than two samples");

  RegimeReport r;
  const double span = series.t[i1] - series.t[i0];
  r.h_rate = (series.h_front[i1] - series.h_front[i0]) / span;
  r.g_rate = (series.g_front[i0] - series.g_front[i1]) / span;
  r.front_rate = std::max(r.h_rate, r.g_rate);
  r.final_mass = series.mass_u[i1];
  r.peak_mass = *std::max_element(series.mass_u.begin(), series.mass_u.begin() + static_cast<long>(i1) + 1);
  r.g_final = series.g_front[i1];
  r.h_final = series.h_front[i1];

  bool nonincreasing = true;
  for (std::size_t i = i0; i < i1; ++i)
    if (series.mass_u[i + 1] > series.mass_u[i] * (1.0 + 1e-12)) nonincreasing = false;

  if (r.front_rate < options.eps_front && r.final_mass < options.eps_mass && nonincreasing) {
    r.regime = Regime::Vanishing;
    r.g_inf_est = r.g_final;
    r.h_inf_est = r.h_final;
  } else if (r.front_rate > options.spreading_factor * options.eps_front && r.final_mass >= options.eps_mass) {
    r.regime = Regime::Spreading;
  } else {
    r.regime = Regime::Undecided;
  }
  return r;
}

namespace {

TheoremCheck make_check(std::string name, double margin, std::string details, bool strict = false) {
  TheoremCheck c;
  c.name = std::move(name);
  c.margin = margin;
  c.pass = strict ? margin > 0.0 : margin >= 0.0;
  c.details = std::move(details);
  return c;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

}  // namespace

std::vector<TheoremCheck> verify_theorems(const RegimeReport& report, const ModelParams& params,
                                          const ValidatedKernel& kernel, const SimState& final_state,
                                          const TimeSeries& series, const VerifyOptions& options) {
  params.validate();
  if (report.regime == Regime::Undecided)
    throw Error(ErrorCode::Undecided, "the run is neither vanishing nor spreading at the chosen thresholds");
  if (series.size() == 0) throw Error(ErrorCode::InvalidArgument, "empty series");

  std::vector<TheoremCheck> checks;
  const double k = params.k;
  const double d1 = params.d1;

  if (report.regime == Regime::Vanishing) {
    const double g_inf = *report.g_inf_est;
    const double h_inf = *report.h_inf_est;

    checks.push_back(make_check("vanishing_d1_gt_1_minus_k", d1 - (1.0 - k),
                                "d1 = " + fmt(d1) + ", 1 - k = " + fmt(1.0 - k), true));

    const double eigen_dx = options.eigen_dx > 0.0 ? options.eigen_dx : final_state.grid.dx;
    const EigenResult eig = principal_eigenvalue(kernel, d1, g_inf, h_inf, eigen_dx);
    checks.push_back(make_check("vanishing_lambda_p", (k - 1.0 + options.lambda_tol) - eig.lambda_p,
                                "lambda_p = " + fmt(eig.lambda_p) + " on (" + fmt(g_inf) + ", " + fmt(h_inf) +
                                    "), k - 1 = " + fmt(k - 1.0)));

    const double final_mass = std::max(report.final_mass, 1e-300);
    checks.push_back(make_check("vanishing_mass_decay",
                                std::log10(report.peak_mass / final_mass) - std::log10(options.mass_decay_factor),
                                "peak " + fmt(report.peak_mass) + ", final " + fmt(report.final_mass)));

    const double C = options.compact_half_width > 0.0 ? options.compact_half_width : 2.0 * params.h0;
    const Eigen::VectorXd dev = (final_state.v.array() - 1.0).abs().matrix();
    const double v_dev = integrate(final_state.grid, dev, -C, C);
    checks.push_back(make_check("vanishing_v_dev_compact", options.v_tol - v_dev,
                                "int_{-" + fmt(C) + "}^{" + fmt(C) + "} |v - 1| = " + fmt(v_dev)));

    double sup_out = 0.0;
    for (Index i = 0; i < final_state.grid.count; ++i) {
      const double x = final_state.grid.x(i);
      if (x < -C || x > C || (x > g_inf && x < h_inf)) continue;
      sup_out = std::max(sup_out, dev(i));
    }
    checks.push_back(make_check("vanishing_v_outside_fronts", options.v_tol - sup_out,
                                "sup |v - 1| on [-C, C] minus (g, h) = " + fmt(sup_out)));

    const ThetaReport theta = theta_classify(params);
    const double sup_u = final_state.u.maxCoeff();
    if (d1 >= 1.0 || theta.verdict_roots == Theta::Theta1) {
      checks.push_back(make_check("vanishing_sup_u", options.sup_u_tol - sup_u,
                                  to_string(theta.verdict_roots) + ", sup u = " + fmt(sup_u)));
    } else {
      // Only reports whether the final profile matches the exceptional plateau.
      const double plateau = k * x_star(theta) - theta.d1_tilde;
      int run_length = 0, best = 0;
      for (Index i = 0; i < final_state.grid.count; ++i) {
        run_length = std::abs(final_state.u(i) - plateau) < options.plateau_tol ? run_length + 1 : 0;
        best = std::max(best, run_length);
      }
      const bool matched = best >= options.plateau_nodes;
      TheoremCheck c;
      c.name = "vanishing_plateau_pattern";
      c.pass = true;
      c.margin = 0.0;
      c.details = std::string(matched ? "plateau at " : "no plateau at ") + fmt(plateau) + " (longest run " +
                  std::to_string(best) + " nodes), sup u = " + fmt(sup_u);
      checks.push_back(c);
    }
    return checks;
  }

  if (k >= 1.0) throw Error(ErrorCode::OutOfScope, "spreading with k >= 1 is not covered");

  checks.push_back(make_check("spreading_fronts_diverge", std::min(report.h_rate, report.g_rate) - options.diverge_rate,
                              "trailing rates h: " + fmt(report.h_rate) + ", -g: " + fmt(report.g_rate), true));

  const Eigen::Vector2d target = params.h_comp >= 1.0
                                     ? Eigen::Vector2d(1.0, 0.0)
                                     : Eigen::Vector2d((1.0 - k) / (1.0 - params.h_comp * k),
                                                       (1.0 - params.h_comp) / (1.0 - params.h_comp * k));
  const Eigen::Vector2d center = final_state.at(0.0);
  const double dev = (center - target).cwiseAbs().maxCoeff();
  checks.push_back(make_check("spreading_center_limit", options.center_tol - dev,
                              "(u, v)(T, 0) = (" + fmt(center(0)) + ", " + fmt(center(1)) + "), target (" +
                                  fmt(target(0)) + ", " + fmt(target(1)) + ")"));
  return checks;
}

ComparisonBound comparison_bound_check(const TimeSeries& series, double v0_max, double gamma, double tol) {
  if (series.size() == 0) throw Error(ErrorCode::InvalidArgument, "empty series");
  ComparisonBound out;
  out.worst_margin = std::numeric_limits<double>::infinity();
  const double k1 = v0_max + 1.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double bound = 1.0 + (k1 - 1.0) * std::exp(-gamma * series.t[i]) + tol;
    out.worst_margin = std::min(out.worst_margin, bound - series.sup_v[i]);
  }
  out.holds = out.worst_margin >= 0.0;
  return out;
}

}  // namespace nlfb
