#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nlfb/config.hpp"
#include "nlfb/dynamics_ode.hpp"
#include "nlfb/eigenvalue.hpp"
#include "nlfb/error.hpp"
#include "nlfb/kernels.hpp"
#include "nlfb/report.hpp"
#include "nlfb/runner.hpp"

namespace {

struct CommonArgs {
  std::string config;
  std::vector<std::string> overrides;
  std::string out;
  int jobs = 1;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config, "Scenario file (TOML-style sections)")->check(CLI::ExistingFile);
  cmd->add_option("--set", args.overrides, "Override dotted.path=value; repeatable")->take_all();
  cmd->add_option("--out", args.out, "Output directory (default: output.dir)");
  cmd->add_option("--jobs", args.jobs, "Concurrent sweep cells")->check(CLI::PositiveNumber);
  cmd->add_flag("--quiet", args.quiet, "Suppress console summaries");
}

nlfb::ScenarioConfig load(const CommonArgs& args) {
  if (!args.config.empty()) return nlfb::load_scenario(args.config, args.overrides);
  nlfb::ConfigDocument doc;
  for (const auto& o : args.overrides) nlfb::apply_override(doc, o);
  return nlfb::scenario_from_document(doc);
}

std::string out_dir(const CommonArgs& args, const nlfb::ScenarioConfig& config) {
  return args.out.empty() ? config.output.dir : args.out;
}

std::string in_dir(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void emit(const CommonArgs& args, const std::string& path, const std::string& content, bool echo) {
  nlfb::write_text_file(path, content);
  if (args.quiet) return;
  if (echo) std::cout << content;
  std::cout << "wrote " << path << '\n';
}

nlfb::Json kernel_summary(const nlfb::KernelSpec& spec, double dx) {
  const nlfb::ValidatedKernel k = nlfb::validate_kernel(spec, dx);
  const nlfb::Stencil stencil(k, dx);
  nlfb::Json j;
  j["form"] = nlfb::to_string(spec.form);
  j["support_radius"] = k.support_radius();
  j["peak"] = k.peak();
  j["raw_mass"] = k.raw_mass();
  j["renormalization"] = k.renormalization();
  j["cdf_at_zero"] = k.cdf(0.0);
  j["stencil_radius"] = stencil.radius();
  j["stencil_mass"] = stencil.weights().sum();
  return j;
}

int validate_kernel_cmd(const CommonArgs& args) {
  const auto config = load(args);
  nlfb::Json j;
  j["j1"] = kernel_summary(nlfb::resolve_kernel(config.j1), config.numerics.dx);
  j["j2"] = kernel_summary(nlfb::resolve_kernel(config.j2), config.numerics.dx);
  emit(args, in_dir(out_dir(args, config), "kernels.json"), nlfb::dump_json(j), true);
  return nlfb::kExitSuccess;
}

int eigen_curve_cmd(const CommonArgs& args) {
  const auto config = load(args);
  const nlfb::ValidatedKernel j1 = nlfb::validate_kernel(nlfb::resolve_kernel(config.j1), config.numerics.dx);
  const double dx = config.eigen.dx > 0.0 ? config.eigen.dx : j1.support_radius() / 40.0;
  const auto curve = nlfb::eigen_curve(j1, config.params.d1, config.eigen.lengths, dx);
  emit(args, in_dir(out_dir(args, config), "eigen_curve.txt"), nlfb::eigen_curve_text(curve), true);
  return nlfb::kExitSuccess;
}

int classify_cmd(const CommonArgs& args) {
  const auto config = load(args);
  const auto& p = config.params;
  nlfb::Json j;
  j["equilibria"] = nlfb::to_json(nlfb::equilibria_and_class(p));
  j["theta"] = nlfb::to_json(nlfb::theta_classify(p));
  if (p.k < 1.0) {
    const auto bounds = nlfb::attractor_bounds(p.k, p.h_comp, 60);
    nlfb::Json b;
    b["outcome"] = bounds.outcome == nlfb::AttractorOutcome::UDominance ? "u_dominance" : "coexistence_limits";
    b["dominance_step"] = bounds.dominance_step;
    b["limits"] = nlfb::Json::array({bounds.limits(0), bounds.limits(1)});
    b["u_lower"] = bounds.u_lower;
    b["v_upper"] = bounds.v_upper;
    b["u_upper"] = bounds.u_upper;
    b["v_lower"] = bounds.v_lower;
    j["attractor_bounds"] = b;
  } else {
    j["attractor_bounds"] = nullptr;
  }
  emit(args, in_dir(out_dir(args, config), "classify.json"), nlfb::dump_json(j), true);
  return nlfb::kExitSuccess;
}

int ode_cmd(const CommonArgs& args) {
  const auto config = load(args);
  const auto traj = nlfb::ode_trajectory(config.params, {config.ode.u0, config.ode.v0}, config.ode.T, config.ode.dt);
  emit(args, in_dir(out_dir(args, config), "ode.csv"), nlfb::ode_csv(traj), false);
  if (!args.quiet) {
    const auto s = traj.final_state();
    std::cout << "competition case: " << nlfb::to_string(nlfb::equilibria_and_class(config.params).competition_case)
              << "\n(u, v)(T) = (" << nlfb::format_double(s(0)) << ", " << nlfb::format_double(s(1)) << ")\n";
  }
  return nlfb::kExitSuccess;
}

int simulate_cmd(const CommonArgs& args, bool verbose_checks) {
  const auto config = load(args);
  std::ostream* log = args.quiet ? nullptr : &std::cout;
  const std::string dir = out_dir(args, config);
  const int code = nlfb::run_scenario(config, dir, log);
  if (verbose_checks && !args.quiet) std::cout << (code == 0 ? "all checks passed\n" : "some checks failed\n");
  return code;
}

int sweep_cmd(const CommonArgs& args) {
  const auto config = load(args);
  const std::string dir = out_dir(args, config);
  const auto result = nlfb::sweep(config, args.jobs, in_dir(dir, "cells"));
  emit(args, in_dir(dir, "sweep.csv"), nlfb::sweep_csv(result), true);
  return nlfb::kExitSuccess;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlocal competition model with free boundaries"};
  app.require_subcommand(1);

  CommonArgs args;
  struct Command {
    const char* name;
    const char* help;
  };
  const std::vector<Command> commands = {
      {"validate-kernel", "Validate both dispersal kernels and print their properties"},
      {"eigen-curve", "Principal eigenvalue of the j1 operator over eigen.lengths"},
      {"classify", "Equilibria, competition case, Theta split and attractor bounds"},
      {"ode", "Integrate the kinetic ODE from (ode.u0, ode.v0)"},
      {"simulate", "Run a scenario and write its outputs"},
      {"sweep", "Run the Cartesian product of sweep.axes"},
      {"verify", "Run a scenario and report every consistency check"},
  };
  for (const auto& c : commands) add_common(app.add_subcommand(c.name, c.help), args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : nlfb::kExitConfig;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    if (name == "validate-kernel") return validate_kernel_cmd(args);
    if (name == "eigen-curve") return eigen_curve_cmd(args);
    if (name == "classify") return classify_cmd(args);
    if (name == "ode") return ode_cmd(args);
    if (name == "simulate") return simulate_cmd(args, false);
    if (name == "sweep") return sweep_cmd(args);
    return simulate_cmd(args, true);
  } catch (const nlfb::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return nlfb::exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return nlfb::kExitNumerical;
  }
}
