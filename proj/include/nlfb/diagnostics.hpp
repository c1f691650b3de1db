#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nlfb/dynamics_ode.hpp"
#include "nlfb/kernels.hpp"
#include "nlfb/simulator.hpp"

namespace nlfb {

struct Metrics {
  double mass_u = 0.0;  ///< ∫ u
  double sup_u = 0.0;
  double v_dev = 0.0;   ///< ∫_{-L}^{L} |v - 1|
  double sup_v = 0.0;
  double half_width = 0.0;
};

/// Throws WindowTooSmall unless [-L, L] lies inside the grid window.
Metrics metrics(const SimState& state, double L);

/// ∫_{x-L}^{x+L} u
double windowed_mass_u(const SimState& state, double x, double L);
/// (1 / 2L) ∫_{x-L}^{x+L} v
double windowed_mean_v(const SimState& state, double x, double L);

enum class Regime { Vanishing, Spreading, Undecided };
std::string to_string(Regime r);

struct TheoremCheck {
  std::string name;
  bool pass = false;
  double margin = 0.0;  ///< >= 0 when the check passes
  std::string details;
};

struct RegimeReport {
  Regime regime = Regime::Undecided;
  std::optional<double> g_inf_est, h_inf_est;  ///< vanishing only
  double front_rate = 0.0;                     ///< trailing growth rate, max over the two fronts
  double h_rate = 0.0, g_rate = 0.0;           ///< trailing rates of h_front and -g_front
  double final_mass = 0.0;
  double peak_mass = 0.0;
  double g_final = 0.0, h_final = 0.0;
  std::vector<TheoremCheck> checks;
};

struct DetectOptions {
  double eps_front = 1e-5;
  double eps_mass = 1e-6;
  double trailing_fraction = 0.2;
  double spreading_factor = 10.0;
};

/// Vanishing: trailing front growth < eps_front, final mass < eps_mass and
/// mass nonincreasing over the trailing window. Spreading: trailing growth
/// > spreading_factor * eps_front with final mass >= eps_mass. Otherwise undecided.
RegimeReport detect_regime(const TimeSeries& series, double T_max, const DetectOptions& options = {});

struct VerifyOptions {
  double lambda_tol = 5e-3;
  double v_tol = 5e-2;
  double center_tol = 1e-2;
  double sup_u_tol = 1e-3;
  double mass_decay_factor = 100.0;
  double diverge_rate = 1e-4;  ///< both trailing front rates must exceed this when spreading
  double plateau_tol = 1e-2;
  int plateau_nodes = 3;
  double compact_half_width = 0.0;  ///< 0 means 2 h0
  double eigen_dx = 0.0;            ///< 0 means the simulation grid spacing
};

/// Consistency checks for a decided run.
///
/// Throws Undecided for an undecided report and OutOfScope for spreading
/// with k >= 1.
std::vector<TheoremCheck> verify_theorems(const RegimeReport& report, const ModelParams& params,
                                          const ValidatedKernel& kernel, const SimState& final_state,
                                          const TimeSeries& series, const VerifyOptions& options = {});

struct ComparisonBound {
  bool holds = true;
  double worst_margin = 0.0;  ///< min over samples of bound - sup_v
};

/// sup_v(t) <= 1 + (k1 - 1) e^{-γ t} + tol with k1 = v0_max + 1.
ComparisonBound comparison_bound_check(const TimeSeries& series, double v0_max, double gamma, double tol = 5e-3);

}  // namespace nlfb
