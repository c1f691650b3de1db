#include "nlfb/dynamics_ode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nlfb/error.hpp"
#include "nlfb/quadratic.hpp"

namespace nlfb {

namespace {

constexpr double kUnitIntervalTolerance = 1e-12;
constexpr double kUndershootClip = -1e-14;

}  // namespace

void ModelParams::validate() const {
  const auto check = [](double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value))
      throw Error(ErrorCode::InvalidParams, std::string(name) + " must be a positive finite number");
  };
  check(d1, "d1");
  check(d2, "d2");
  check(k, "k");
  check(h_comp, "h_comp");
  check(gamma, "gamma");
  check(mu, "mu");
  check(h0, "h0");
}

std::string to_string(CompetitionCase c) {
  switch (c) {
    case CompetitionCase::Weak: return "weak";
    case CompetitionCase::UStrong: return "u_strong";
    case CompetitionCase::VStrong: return "v_strong";
    case CompetitionCase::Strong: return "strong";
    case CompetitionCase::BoundaryCase: return "boundary_case";
  }
  return "unknown";
}

std::string to_string(Theta t) { return t == Theta::Theta1 ? "Theta1" : "Theta2"; }

std::string to_string(SufficientCondition c) {
  return c == SufficientCondition::D1AtLeastOne ? "d1_ge_1" : "kh_small";
}

EquilibriumSet equilibria_and_class(const ModelParams& params) {
  params.validate();
  const double k = params.k;
  const double h = params.h_comp;
  EquilibriumSet eq;
  if (k == 1.0 || h == 1.0) {
    eq.competition_case = CompetitionCase::BoundaryCase;
  } else if (std::max(k, h) < 1.0) {
    eq.competition_case = CompetitionCase::Weak;
  } else if (std::min(k, h) > 1.0) {
    eq.competition_case = CompetitionCase::Strong;
  } else if (k < 1.0) {
    eq.competition_case = CompetitionCase::UStrong;
  } else {
    eq.competition_case = CompetitionCase::VStrong;
  }
  if (std::max(k, h) < 1.0 || std::min(k, h) > 1.0) {
    const double det = 1.0 - h * k;
    eq.r_star = Eigen::Vector2d((1.0 - k) / det, (1.0 - h) / det);
  }
  return eq;
}

OdeTrajectory ode_trajectory(const ModelParams& params, Eigen::Vector2d init, double T, double dt) {
  params.validate();
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  if (!(T >= 0.0)) throw Error(ErrorCode::InvalidArgument, "T must be nonnegative");
  if (init.minCoeff() < 0.0) throw Error(ErrorCode::InvalidArgument, "initial state must be nonnegative");

  const auto rhs = [&](const Eigen::Vector2d& s) {
    return Eigen::Vector2d(s(0) * (1.0 - s(0) - params.k * s(1)),
                           params.gamma * s(1) * (1.0 - s(1) - params.h_comp * s(0)));
  };
  const Eigen::Vector2d box(10.0 * std::max(1.0, init(0)), 10.0 * std::max(1.0, init(1)));

  OdeTrajectory traj;
  const auto steps = static_cast<long>(std::ceil(T / dt - 1e-12));
  traj.t.reserve(steps + 1);
  traj.u.reserve(steps + 1);
  traj.v.reserve(steps + 1);
  traj.t.push_back(0.0);
  traj.u.push_back(init(0));
  traj.v.push_back(init(1));

  Eigen::Vector2d s = init;
  for (long n = 0; n < steps; ++n) {
    const double t0 = static_cast<double>(n) * dt;
    const double h = std::min(dt, T - t0);
    const Eigen::Vector2d k1 = rhs(s);
    const Eigen::Vector2d k2 = rhs(s + 0.5 * h * k1);
    const Eigen::Vector2d k3 = rhs(s + 0.5 * h * k2);
    const Eigen::Vector2d k4 = rhs(s + h * k3);
    s += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    for (int c = 0; c < 2; ++c) {
      if (s(c) < kUndershootClip) s(c) = 0.0;
      if (!std::isfinite(s(c)) || std::abs(s(c)) > box(c))
        throw Error(ErrorCode::StepTooLarge, "trajectory left the invariant box at t = " + std::to_string(t0 + h));
    }
    traj.t.push_back(t0 + h);
    traj.u.push_back(s(0));
    traj.v.push_back(s(1));
  }
  return traj;
}

ThetaReport theta_classify(const ModelParams& params) {
  params.validate();
  const double g = params.gamma;
  const double h = params.h_comp;
  const double k = params.k;

  ThetaReport r;
  r.k = k;
  r.d1_tilde = params.d1_tilde();
  r.a = g * (1.0 - h * k);
  r.b = r.d1_tilde * g * h - g * (1.0 - h * k) - params.d2;
  r.c = -r.d1_tilde * g * h;

  for (double s : real_quadratic_roots(r.a, r.b, r.c)) {
    if (s >= -kUnitIntervalTolerance && s <= 1.0 + kUnitIntervalTolerance)
      r.roots_in_unit_interval.push_back(std::clamp(s, 0.0, 1.0));
  }
  r.verdict_roots = r.roots_in_unit_interval.empty() ? Theta::Theta1 : Theta::Theta2;

  if (r.d1_tilde > 0.0) {
    const double vertex = r.b / (-2.0 * r.a);
    const bool theta2 = r.a <= r.c && std::sqrt(r.c / r.a) <= vertex && vertex <= 1.0;
    r.verdict_closed_form = theta2 ? Theta::Theta2 : Theta::Theta1;

    if (params.d1 >= 1.0)
      r.sufficient_condition_hit = SufficientCondition::D1AtLeastOne;
    else if (k * h <= 1.0 + params.d2 / g)
      r.sufficient_condition_hit = SufficientCondition::KhSmall;
  }

  for (double s : r.roots_in_unit_interval) {
    if (s > 0.0) {
      r.x_star = s;
      break;
    }
  }
  return r;
}

double x_star(const ThetaReport& report) {
  if (report.verdict_roots != Theta::Theta2 || !report.x_star)
    throw Error(ErrorCode::NotInTheta2, "F has no positive root in [0, 1]");
  const double xs = *report.x_star;
  if (!(report.k * xs - report.d1_tilde > 0.0))
    throw std::logic_error("k x_* - d1_tilde must be positive at the smallest root of F");
  return xs;
}

AttractorBounds attractor_bounds(double k, double h_comp, int j_max) {
  if (!(k > 0.0) || !(h_comp > 0.0)) throw Error(ErrorCode::InvalidParams, "k and h_comp must be positive");
  if (k >= 1.0) throw Error(ErrorCode::AssumptionViolated, "bound iteration requires k < 1");
  if (j_max < 1) throw Error(ErrorCode::InvalidArgument, "j_max must be at least 1");

  AttractorBounds out;
  out.u_lower.push_back(1.0 - k);
  out.v_upper.push_back(1.0);
  for (int j = 1; j <= j_max; ++j) {
    if (h_comp * out.u_lower.back() >= 1.0) {
      out.outcome = AttractorOutcome::UDominance;
      out.dominance_step = j;
      out.limits = Eigen::Vector2d(1.0, 0.0);
      break;
    }
    if (j == j_max) break;
    const double v_next = 1.0 - h_comp * out.u_lower.back();
    out.v_upper.push_back(v_next);
    out.u_lower.push_back(1.0 - k * v_next);
  }

  if (h_comp < 1.0) {
    out.v_lower.push_back(1.0 - h_comp);
    out.u_upper.push_back(1.0);
    for (int j = 1; j < j_max; ++j) {
      const double u_next = 1.0 - k * out.v_lower.back();
      out.u_upper.push_back(u_next);
      out.v_lower.push_back(1.0 - h_comp * u_next);
    }
  }

  if (out.outcome == AttractorOutcome::CoexistenceLimits) {
    const double det = 1.0 - h_comp * k;
    out.limits = det > 0.0 ? Eigen::Vector2d((1.0 - k) / det, (1.0 - h_comp) / det) : Eigen::Vector2d(1.0, 0.0);
  }
  return out;
}

InvariantRegion make_invariant_region(const ModelParams& params, double sigma, double epsilon_cap) {
  params.validate();
  const double dt1 = params.d1_tilde();
  if (!(dt1 > 0.0)) throw Error(ErrorCode::InvalidParams, "invariant regions need d1 + k - 1 > 0");
  if (!(epsilon_cap > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon cap must be positive");
  if (!(sigma > dt1 / params.k) || !(sigma < 1.0))
    throw Error(ErrorCode::InvalidSigma, "sigma must lie in (d1_tilde / k, 1)");
  InvariantRegion region;
  region.sigma = sigma;
  region.epsilon = std::min(params.k * sigma - dt1, epsilon_cap);
  region.m_sigma = params.k * sigma - dt1 + region.epsilon;
  return region;
}

InvariantRegionVerdict invariant_region_check(const ModelParams& params, const InvariantRegion& region,
                                              double m1_bound, double m2_bound) {
  params.validate();
  const double dt1 = params.d1_tilde();
  if (!(dt1 > 0.0)) throw Error(ErrorCode::InvalidParams, "invariant regions need d1 + k - 1 > 0");
  if (!(region.sigma > dt1 / params.k) || !(region.sigma < 1.0))
    throw Error(ErrorCode::InvalidSigma, "sigma must lie in (d1_tilde / k, 1)");
  if (m1_bound < 0.0 || m2_bound < 0.0) throw Error(ErrorCode::InvalidArgument, "forcing bounds must be >= 0");

  const ThetaReport theta = theta_classify(params);
  const double sigma = region.sigma;
  InvariantRegionVerdict verdict;
  // u_t = m1 + u(k σ - d1_tilde - u) at u = M_σ equals m1 - M_σ ε.
  verdict.u_margin = m1_bound - region.m_sigma * region.epsilon;
  verdict.v_margin = m2_bound + (1.0 - sigma) * params.gamma * params.h_comp * region.epsilon + theta.F(sigma);
  verdict.holds = verdict.u_margin < 0.0 && verdict.v_margin < 0.0;
  return verdict;
}

}  // namespace nlfb
