#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nlfb/diagnostics.hpp"
#include "nlfb/dynamics_ode.hpp"
#include "nlfb/kernels.hpp"
#include "nlfb/simulator.hpp"

namespace nlfb {

/// A scalar or numeric array from a sectioned key-value document.
using ConfigValue = std::variant<double, bool, std::string, std::vector<double>>;

/// Flat dotted-path view of a sectioned key-value document, e.g.
/// `[params]\nmu = 5` becomes {"params.mu": 5}. Keys under `[sweep.axes]`
/// may be quoted dotted paths.
using ConfigDocument = std::map<std::string, ConfigValue>;

/// Throws ConfigInvalid with the offending line number.
ConfigDocument parse_config_text(const std::string& text);
ConfigDocument read_config_file(const std::string& path);

/// Applies `dotted.path=value`. The value is parsed like a right-hand side;
/// an unquoted word is taken as a string.
void apply_override(ConfigDocument& doc, const std::string& assignment);

struct KernelConfig {
  KernelSpec spec;
  std::string table;  ///< path of a two-column table for the tabulated form
};

struct InitialConfig {
  std::string u0 = "cosine";  ///< cosine | table
  double u_max = 1.0;
  std::string u0_table;
  std::string v0 = "constant";  ///< constant | cosine | table
  double v0_value = 1.0;
  std::string v0_table;
};

struct NumericsConfig {
  double dx = 0.025;
  double dt = 0.02;
  double T = 50.0;
  double snapshot_every = 1.0;
  double field_every = 0.0;  ///< interval of x,u,v snapshot files; 0 writes initial and final only
  double window_pad = 4.0;
  double metrics_half_width = 1.0;
  bool dt_halving_check = false;
};

struct DiagnosticsConfig {
  DetectOptions detect;
  VerifyOptions verify;
  double comparison_tol = 5e-3;
};

struct OutputConfig {
  std::string dir = "out";
  bool svg = true;
};

struct SweepConfig {
  std::vector<std::pair<std::string, std::vector<double>>> axes;  ///< in document order of the path names
  long max_cells = 256;
  std::optional<std::uint64_t> seed;
};

struct EigenConfig {
  std::vector<double> lengths{0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0};
  double dx = 0.0;  ///< 0 means support / 40 of j1
};

struct OdeConfig {
  double u0 = 0.5, v0 = 0.5;
  double T = 100.0, dt = 0.01;
};

struct ScenarioConfig {
  ModelParams params;
  KernelConfig j1, j2;
  InitialConfig initial;
  NumericsConfig numerics;
  DiagnosticsConfig diagnostics;
  OutputConfig output;
  SweepConfig sweep;
  EigenConfig eigen;
  OdeConfig ode;
};

/// Builds and validates a scenario. Unknown paths, wrong value types,
/// non-positive numbers and dt above the stability bound raise
/// ConfigInvalid naming the path. Relative table paths resolve against base_dir.
ScenarioConfig scenario_from_document(const ConfigDocument& doc, const std::string& base_dir = "");

/// Every recognised path with its current value.
ConfigDocument to_document(const ScenarioConfig& config);

/// Normalized text: fixed section and key order, numbers with 17 significant digits.
std::string serialize_config(const ScenarioConfig& config);
std::string serialize_document(const ConfigDocument& doc);

/// Reads, applies overrides in order and validates.
ScenarioConfig load_scenario(const std::string& path, const std::vector<std::string>& overrides = {});

/// Kernel ready for use; tabulated kernels read their table here.
KernelSpec resolve_kernel(const KernelConfig& kernel);
Profile initial_u(const InitialConfig& initial);
Profile initial_v(const InitialConfig& initial);

/// %.17g
std::string format_double(double x);

}  // namespace nlfb
