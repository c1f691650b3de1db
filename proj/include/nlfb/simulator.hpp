#pragma once

#include <functional>
#include <memory>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "nlfb/dynamics_ode.hpp"
#include "nlfb/grid.hpp"
#include "nlfb/kernels.hpp"

namespace nlfb {

/// Coefficients of the unreduced system
///   U_t = D1 (J1 * U - U) + U (a1 - b1 U - c1 V)   on (G, H)
///   V_t = D2 (J2 * V - V) + V (a2 - b2 V - c2 U)   on R
///   H' = mu_hat ∫∫ J1 U,  G' = -mu_hat ∫∫ J1 U,  H(0) = -G(0) = H0.
struct GeneralParams {
  double D1 = 1.0, D2 = 1.0;
  double a1 = 1.0, b1 = 1.0, c1 = 0.5;
  double a2 = 1.0, b2 = 1.0, c2 = 0.5;
  double mu_hat = 1.0;
  double H0 = 1.0;

  static GeneralParams from_reduced(const ModelParams& p);
};

/// Maps the unreduced solution onto the reduced one:
/// u(t, x) = u_scale U(t / time_scale, x), v(t, x) = v_scale V(t / time_scale, x).
struct ScalingTransform {
  double u_scale = 1.0;
  double v_scale = 1.0;
  double time_scale = 1.0;
};

/// Throws NonPositiveParameter if any general coefficient is not positive.
std::pair<ModelParams, ScalingTransform> reduce_general(const GeneralParams& general);

/// u0 = u_max cos(π x / (2 h0)) on (-h0, h0).
struct CosineBump {
  double u_max = 1.0;
};
struct ConstantProfile {
  double value = 1.0;
};
/// Linearly interpolated samples, zero outside the table range.
struct TabulatedProfile {
  std::vector<double> x, value;
};
using Profile = std::variant<CosineBump, ConstantProfile, TabulatedProfile>;

struct AuditCounters {
  long clamp_count = 0;
  long window_expansions = 0;
  double max_leakage = 0.0;  ///< largest edge leakage seen by the constant continuation of v
};

/// State of one run. u lives on the nodes strictly inside (g_front, h_front)
/// and is exactly zero elsewhere; v covers the whole window.
struct SimState {
  double t = 0.0;
  double g_front = 0.0;
  double h_front = 0.0;
  Grid1d grid;
  Eigen::VectorXd u;
  Eigen::VectorXd v;
  GeneralParams coeffs;
  std::shared_ptr<const ValidatedKernel> j1, j2;
  std::shared_ptr<const Stencil> s1, s2;
  AuditCounters audit;
  double u_cap = 10.0;  ///< StabilityViolated above these
  double v_cap = 10.0;

  double max_support_radius() const { return std::max(j1->support_radius(), j2->support_radius()); }
  /// Values at the node nearest to x.
  Eigen::Vector2d at(double x) const;
};

/// Largest dt accepted for the reduced system:
/// 0.2 / (d1 + d2 + γ (1 + h_comp + 2) + (1 + k + 2)).
double stable_dt(const ModelParams& params);
double stable_dt(const GeneralParams& general);

SimState init_state(const ModelParams& params, const ValidatedKernel& j1, const ValidatedKernel& j2,
                    const Profile& u0, const Profile& v0, double dx, double window_pad);
SimState init_state(const GeneralParams& general, const ValidatedKernel& j1, const ValidatedKernel& j2,
                    const Profile& u0, const Profile& v0, double dx, double window_pad);

/// (g', h') from the CDF-reduced front laws; g_rate <= 0 <= h_rate.
std::pair<double, double> front_speeds(const SimState& state);

/// Right-hand sides (u_t, v_t) at the current state; u_t is evaluated at the
/// nodes strictly inside (g_front, h_front) and is zero elsewhere.
std::pair<Eigen::VectorXd, Eigen::VectorXd> field_rates(const SimState& state);

/// Explicit Euler step of fields and fronts.
SimState step(const SimState& state, double dt);

struct TimeSeries {
  std::vector<double> t, g_front, h_front, mass_u, sup_u, v_dev, sup_v;
  std::size_t size() const { return t.size(); }
};

struct RunOptions {
  double T = 0.0;
  double dt = 0.01;
  double snapshot_every = 1.0;     ///< series sampling interval
  double field_every = 0.0;        ///< observer interval; 0 calls it only at the start and the end
  double metrics_half_width = 1.0; ///< L of v_dev(L)
};

struct RunResult {
  TimeSeries series;
  SimState final_state;
  bool front_monotone = true;
  bool support_discipline = true;
};

using FieldObserver = std::function<void(const SimState&)>;

/// Advances to T, sampling the series every snapshot_every. Step errors are
/// rethrown with the failing time in the message.
RunResult run(SimState state, const RunOptions& options, const FieldObserver& observer = {});

}  // namespace nlfb
