#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nlfb/config.hpp"
#include "nlfb/diagnostics.hpp"
#include "nlfb/error.hpp"
#include "nlfb/report.hpp"
#include "nlfb/simulator.hpp"

namespace nlfb {

enum ExitCode : int {
  kExitSuccess = 0,
  kExitConfig = 2,
  kExitNumerical = 3,
  kExitCheckFailed = 4,
};

/// Exit code for a caught library error: config and I/O errors map to 2,
/// everything else to 3.
int exit_code_for(const Error& e);

struct ScenarioResult {
  RunResult run;
  RegimeReport regime;  ///< checks filled by verification
  ThetaReport theta;
  ComparisonBound comparison;
  std::optional<DtHalving> halving;
  Json report;
  bool checks_pass = true;
};

/// validate -> simulate -> diagnose -> verify, without touching the file system
/// beyond reading tables. Verification errors (undecided regime, spreading
/// with k >= 1) are recorded as a failing check rather than thrown.
ScenarioResult simulate_scenario(const ScenarioConfig& config, const FieldObserver& observer = {});

/// simulate_scenario plus timeseries.csv, snapshot files, report.json and
/// the optional profile.svg under out_dir. Returns 0 or 4.
int run_scenario(const ScenarioConfig& config, const std::string& out_dir, std::ostream* log = nullptr);

struct SweepRow {
  std::size_t cell = 0;
  std::vector<double> values;  ///< one per axis
  std::string regime;          ///< empty on error
  double g_front = 0.0, h_front = 0.0, mass_u = 0.0;
  bool checks_pass = false;
  std::string worst_check;
  double worst_margin = 0.0;
  std::string error;
};

struct SweepResult {
  std::vector<std::string> axes;
  std::vector<SweepRow> rows;  ///< enumeration order, last axis fastest
};

/// Cartesian product over config.sweep.axes. Cells run on up to `jobs`
/// threads; a seed shuffles the dispatch order only. Throws GridTooLarge
/// above config.sweep.max_cells. With a nonempty out_dir every cell writes
/// its own cell_NNNN directory.
SweepResult sweep(const ScenarioConfig& config, int jobs, const std::string& out_dir = "");

std::string sweep_csv(const SweepResult& result);

}  // namespace nlfb
