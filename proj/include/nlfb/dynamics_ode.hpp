#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace nlfb {

/// Coefficients of the reduced competition system.
///
/// h_comp is the reaction coefficient of u in the v equation; the right
/// front is always called h_front elsewhere.
struct ModelParams {
  double d1 = 1.0;
  double d2 = 1.0;
  double k = 0.5;
  double h_comp = 0.5;
  double gamma = 1.0;
  double mu = 5.0;
  double h0 = 2.0;

  /// Throws InvalidParams unless every field is strictly positive.
  void validate() const;
  double d1_tilde() const { return d1 + k - 1.0; }
};

enum class CompetitionCase { Weak, UStrong, VStrong, Strong, BoundaryCase };
std::string to_string(CompetitionCase c);

struct EquilibriumSet {
  Eigen::Vector2d r0{0.0, 0.0};
  Eigen::Vector2d r1{1.0, 0.0};
  Eigen::Vector2d r2{0.0, 1.0};
  std::optional<Eigen::Vector2d> r_star;
  CompetitionCase competition_case = CompetitionCase::BoundaryCase;
};

/// Depends on (k, h_comp) only.
EquilibriumSet equilibria_and_class(const ModelParams& params);

struct OdeTrajectory {
  std::vector<double> t, u, v;
  Eigen::Vector2d final_state() const { return {u.back(), v.back()}; }
};

/// RK4 for u' = u(1 - u - k v), v' = γ v(1 - v - h_comp u).
OdeTrajectory ode_trajectory(const ModelParams& params, Eigen::Vector2d init, double T, double dt);

enum class Theta { Theta1, Theta2 };
std::string to_string(Theta t);

enum class SufficientCondition { D1AtLeastOne, KhSmall };
std::string to_string(SufficientCondition c);

/// F(s) = a s^2 + b s + c and the Θ1/Θ2 split, decided two ways.
struct ThetaReport {
  double a = 0.0, b = 0.0, c = 0.0;
  double d1_tilde = 0.0;
  Theta verdict_roots = Theta::Theta1;
  std::optional<Theta> verdict_closed_form;  ///< empty when d1_tilde <= 0
  std::optional<SufficientCondition> sufficient_condition_hit;
  std::vector<double> roots_in_unit_interval;
  std::optional<double> x_star;
  double k = 0.0;  ///< kept so x_star can check k x_* - d1_tilde > 0

  double F(double s) const { return (a * s + b) * s + c; }
};

ThetaReport theta_classify(const ModelParams& params);

/// Smallest root of F in [0, 1]; throws NotInTheta2 for a Θ1 report.
double x_star(const ThetaReport& report);

enum class AttractorOutcome { UDominance, CoexistenceLimits };

struct AttractorBounds {
  std::vector<double> u_lower, v_upper;  ///< u̲_j, v̄_j; v̄_1 = 1
  std::vector<double> u_upper, v_lower;  ///< ū_j, v̲_j; filled only when h_comp < 1; ū_1 = 1
  AttractorOutcome outcome = AttractorOutcome::CoexistenceLimits;
  int dominance_step = 0;  ///< first j with h_comp u̲_j >= 1
  Eigen::Vector2d limits{0.0, 0.0};
};

/// Lower/upper bound sequences for the spreading case (k < 1).
AttractorBounds attractor_bounds(double k, double h_comp, int j_max);

struct InvariantRegion {
  double sigma = 0.0;
  double epsilon = 0.0;
  double m_sigma = 0.0;
};

/// ε = min(k σ - d1_tilde, epsilon_cap), M_σ = k σ - d1_tilde + ε.
/// Throws InvalidSigma unless d1_tilde / k < σ < 1.
InvariantRegion make_invariant_region(const ModelParams& params, double sigma, double epsilon_cap);

struct InvariantRegionVerdict {
  bool holds = false;
  double u_margin = 0.0;  ///< bound on u_t over {p = M_σ, q <= σ}
  double v_margin = 0.0;  ///< bound on (1 - v)_t over {p <= M_σ, q = σ}
};

InvariantRegionVerdict invariant_region_check(const ModelParams& params, const InvariantRegion& region,
                                              double m1_bound, double m2_bound);

}  // namespace nlfb
