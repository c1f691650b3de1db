#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nlfb/diagnostics.hpp"
#include "nlfb/dynamics_ode.hpp"
#include "nlfb/simulator.hpp"

namespace nlfb {

using Json = nlohmann::ordered_json;

/// Serializes with every floating-point number printed as %.17g;
/// non-finite numbers become null.
std::string dump_json(const Json& value, int indent = 2);

Json to_json(const ThetaReport& theta);
Json to_json(const EquilibriumSet& eq);
Json to_json(const TheoremCheck& check);
Json to_json(const AuditCounters& audit);

/// Relative change of the final fronts when dt is halved.
struct DtHalving {
  double dt_half = 0.0;
  double g_rel_change = 0.0;
  double h_rel_change = 0.0;
  double max_rel_change() const { return std::max(g_rel_change, h_rel_change); }
};

struct ReportInputs {
  const RegimeReport* regime = nullptr;
  const ThetaReport* theta = nullptr;
  const RunResult* run = nullptr;
  const ComparisonBound* comparison = nullptr;
  std::optional<DtHalving> halving;
  double dx = 0.0, dt = 0.0, stable_dt = 0.0;
};

/// Object with exactly the keys regime, fronts, theta, theorem_checks, numerics_audit.
Json make_report(const ReportInputs& in);

/// Creates parent directories; throws Io on failure.
void write_text_file(const std::string& path, const std::string& content);

/// Header `t,g_front,h_front,mass_u,sup_u,v_dev_L`.
std::string timeseries_csv(const TimeSeries& series);

/// Whitespace separated `x u v` rows of the whole window.
std::string snapshot_text(const SimState& state);
/// snapshot_t<time>.dat with the time zero padded to a fixed width.
std::string snapshot_file_name(double t);

/// Final u and v polylines over the window with front markers.
std::string profile_svg(const SimState& state);

/// Two columns `l lambda_p`.
std::string eigen_curve_text(const std::vector<std::pair<double, double>>& curve);

/// Columns t,u,v.
std::string ode_csv(const OdeTrajectory& traj);

}  // namespace nlfb
