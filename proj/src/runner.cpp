#include "nlfb/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <ostream>
#include <random>
#include <thread>

#include "nlfb/error.hpp"

namespace nlfb {

namespace {

double relative_change(double value, double reference) {
  return std::abs(value - reference) / std::max(std::abs(reference), 1e-300);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + '"';
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

}  // namespace

int exit_code_for(const Error& e) {
  return e.code() == ErrorCode::ConfigInvalid || e.code() == ErrorCode::Io ? kExitConfig : kExitNumerical;
}

ScenarioResult simulate_scenario(const ScenarioConfig& config, const FieldObserver& observer) {
  const ModelParams& p = config.params;
  const NumericsConfig& num = config.numerics;
  p.validate();

  const ValidatedKernel j1 = validate_kernel(resolve_kernel(config.j1), num.dx);
  const ValidatedKernel j2 = validate_kernel(resolve_kernel(config.j2), num.dx);
  const SimState initial =
      init_state(p, j1, j2, initial_u(config.initial), initial_v(config.initial), num.dx, num.window_pad);
  const double v0_max = initial.v.maxCoeff();

  RunOptions opts;
  opts.T = num.T;
  opts.dt = num.dt;
  opts.snapshot_every = num.snapshot_every;
  opts.field_every = num.field_every;
  opts.metrics_half_width = num.metrics_half_width;

  ScenarioResult out;
  out.run = run(initial, opts, observer);
  out.regime = detect_regime(out.run.series, num.T, config.diagnostics.detect);
  out.theta = theta_classify(p);

  try {
    out.regime.checks = verify_theorems(out.regime, p, j1, out.run.final_state, out.run.series,
                                        config.diagnostics.verify);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Undecided && e.code() != ErrorCode::OutOfScope) throw;
    TheoremCheck c;
    c.name = e.code() == ErrorCode::Undecided ? "regime_decided" : "in_scope";
    c.pass = false;
    c.margin = 0.0;
    c.details = std::string(to_string(e.code())) + ": " + e.message();
    out.regime.checks.push_back(c);
  }
  out.checks_pass = std::all_of(out.regime.checks.begin(), out.regime.checks.end(),
                                [](const TheoremCheck& c) { return c.pass; });

  out.comparison = comparison_bound_check(out.run.series, v0_max, p.gamma, config.diagnostics.comparison_tol);

  if (num.dt_halving_check) {
    RunOptions half = opts;
    half.dt = 0.5 * opts.dt;
    const RunResult fine = run(initial, half);
    DtHalving h;
    h.dt_half = half.dt;
    h.g_rel_change = relative_change(out.run.final_state.g_front, fine.final_state.g_front);
    h.h_rel_change = relative_change(out.run.final_state.h_front, fine.final_state.h_front);
    out.halving = h;
  }

  ReportInputs in;
  in.regime = &out.regime;
  in.theta = &out.theta;
  in.run = &out.run;
  in.comparison = &out.comparison;
  in.halving = out.halving;
  in.dx = num.dx;
  in.dt = num.dt;
  in.stable_dt = stable_dt(p);
  out.report = make_report(in);
  return out;
}

int run_scenario(const ScenarioConfig& config, const std::string& out_dir, std::ostream* log) {
  const std::string snapshots = join_path(out_dir, "snapshots");
  std::filesystem::remove_all(snapshots);
  const FieldObserver observer = [&](const SimState& s) {
    write_text_file(join_path(snapshots, snapshot_file_name(s.t)), snapshot_text(s));
  };

  const ScenarioResult r = simulate_scenario(config, observer);
  write_text_file(join_path(out_dir, "timeseries.csv"), timeseries_csv(r.run.series));
  write_text_file(join_path(out_dir, "report.json"), dump_json(r.report));
  write_text_file(join_path(out_dir, "config.toml"), serialize_config(config));
  if (config.output.svg) write_text_file(join_path(out_dir, "profile.svg"), profile_svg(r.run.final_state));

  if (log) {
    *log << "regime: " << to_string(r.regime.regime) << "  fronts: [" << format_double(r.regime.g_final) << ", "
         << format_double(r.regime.h_final) << "]\n";
    for (const auto& c : r.regime.checks)
      *log << (c.pass ? "  PASS " : "  FAIL ") << c.name << "  margin " << format_double(c.margin) << "  "
           << c.details << '\n';
    *log << "outputs written to " << out_dir << '\n';
  }
  return r.checks_pass ? kExitSuccess : kExitCheckFailed;
}

SweepResult sweep(const ScenarioConfig& config, int jobs, const std::string& out_dir) {
  SweepResult result;
  std::size_t cells = 1;
  for (const auto& [path, values] : config.sweep.axes) {
    result.axes.push_back(path);
    cells *= values.size();
    if (cells > static_cast<std::size_t>(config.sweep.max_cells))
      throw Error(ErrorCode::GridTooLarge, "sweep grid exceeds sweep.max_cells = " +
                                               std::to_string(config.sweep.max_cells));
  }
  if (config.sweep.axes.empty()) throw Error(ErrorCode::ConfigInvalid, "`sweep.axes` is empty");

  result.rows.resize(cells);
  for (std::size_t cell = 0; cell < cells; ++cell) {
    SweepRow& row = result.rows[cell];
    row.cell = cell;
    row.values.resize(config.sweep.axes.size());
    std::size_t rest = cell;
    for (std::size_t a = config.sweep.axes.size(); a-- > 0;) {
      const auto& values = config.sweep.axes[a].second;
      row.values[a] = values[rest % values.size()];
      rest /= values.size();
    }
  }

  ConfigDocument base = to_document(config);
  std::erase_if(base, [](const auto& kv) { return kv.first.rfind("sweep.", 0) == 0; });

  const auto run_cell = [&](std::size_t cell) {
    SweepRow& row = result.rows[cell];
    try {
      ConfigDocument doc = base;
      for (std::size_t a = 0; a < result.axes.size(); ++a) doc[result.axes[a]] = row.values[a];
      const ScenarioConfig cell_config = scenario_from_document(doc);
      const ScenarioResult r = simulate_scenario(cell_config);
      if (!out_dir.empty()) {
        char name[32];
        std::snprintf(name, sizeof name, "cell_%04zu", cell);
        const std::string dir = join_path(out_dir, name);
        write_text_file(join_path(dir, "timeseries.csv"), timeseries_csv(r.run.series));
        write_text_file(join_path(dir, "report.json"), dump_json(r.report));
        write_text_file(join_path(dir, "config.toml"), serialize_config(cell_config));
      }
      row.regime = to_string(r.regime.regime);
      row.g_front = r.regime.g_final;
      row.h_front = r.regime.h_final;
      row.mass_u = r.regime.final_mass;
      row.checks_pass = r.checks_pass;
      if (!r.regime.checks.empty()) {
        const auto worst = std::min_element(r.regime.checks.begin(), r.regime.checks.end(),
                                            [](const TheoremCheck& a, const TheoremCheck& b) {
                                              if (a.pass != b.pass) return !a.pass;
                                              return a.margin < b.margin;
                                            });
        row.worst_check = worst->name;
        row.worst_margin = worst->margin;
      }
    } catch (const std::exception& e) {
      row.error = e.what();
      row.checks_pass = false;
    }
  };

  std::vector<std::size_t> order(cells);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (config.sweep.seed) {
    std::mt19937_64 rng(*config.sweep.seed);
    std::shuffle(order.begin(), order.end(), rng);
  }

  const auto workers = static_cast<std::size_t>(std::clamp(jobs, 1, static_cast<int>(cells)));
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < cells; i = next++) run_cell(order[i]);
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return result;
}

std::string sweep_csv(const SweepResult& result) {
  std::string out = "cell";
  for (const auto& a : result.axes) out += ',' + csv_field(a);
  out += ",regime,g_front,h_front,mass_u,checks_pass,worst_check,worst_margin,error\n";
  for (const auto& row : result.rows) {
    out += std::to_string(row.cell);
    for (double v : row.values) out += ',' + format_double(v);
    const bool ok = row.error.empty();
    out += ',' + row.regime;
    out += ',' + (ok ? format_double(row.g_front) : std::string());
    out += ',' + (ok ? format_double(row.h_front) : std::string());
    out += ',' + (ok ? format_double(row.mass_u) : std::string());
    out += std::string(",") + (row.checks_pass ? "true" : "false");
    out += ',' + row.worst_check;
    out += ',' + (row.worst_check.empty() ? std::string() : format_double(row.worst_margin));
    out += ',' + csv_field(row.error) + '\n';
  }
  return out;
}

}  // namespace nlfb
