#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nlfb/config.hpp"
#include "nlfb/diagnostics.hpp"
#include "nlfb/dynamics_ode.hpp"
#include "nlfb/eigenvalue.hpp"
#include "nlfb/kernels.hpp"
#include "nlfb/runner.hpp"
#include "nlfb/simulator.hpp"

using namespace nlfb;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream notes;

  void require(bool condition, const std::string& what) {
    if (!condition) {
      pass = false;
      notes << " [failed: " << what << "]";
    }
  }
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

ScenarioConfig scenario(const std::vector<std::string>& overrides) {
  ConfigDocument doc;
  for (const auto& o : overrides) apply_override(doc, o);
  return scenario_from_document(doc);
}

const std::vector<std::string> kBaseRun = {
    "params.k=0.5",      "params.h_comp=0.5",      "params.gamma=1", "params.d1=1",
    "params.d2=1",       "params.mu=5",            "params.h0=2",    "kernels.j1.form=uniform",
    "kernels.j2.form=uniform", "numerics.dx=0.025", "numerics.dt=0.02", "numerics.T=400",
    "numerics.snapshot_every=1", "numerics.dt_halving_check=true", "numerics.window_pad=4",
};

std::vector<std::string> with(std::vector<std::string> base, const std::vector<std::string>& extra) {
  base.insert(base.end(), extra.begin(), extra.end());
  return base;
}

// Structural audit shared with criterion 9.
struct Audit {
  std::string name;
  bool clamps_zero, support, monotone, comparison, halving;
  double comparison_margin, halving_change;
};
std::vector<Audit> g_audits;

void record_audit(const std::string& name, const ScenarioResult& r) {
  Audit a;
  a.name = name;
  a.clamps_zero = r.run.final_state.audit.clamp_count == 0;
  a.support = r.run.support_discipline;
  a.monotone = r.run.front_monotone;
  a.comparison = r.comparison.holds;
  a.comparison_margin = r.comparison.worst_margin;
  a.halving_change = r.halving ? r.halving->max_rel_change() : INFINITY;
  a.halving = a.halving_change < 0.02;
  g_audits.push_back(a);
}

const TheoremCheck* find_check(const ScenarioResult& r, const std::string& name) {
  for (const auto& c : r.regime.checks)
    if (c.name == name) return &c;
  return nullptr;
}

Outcome eigen_suite() {
  Outcome o;
  const std::vector<double> lengths = {0.5, 1, 2, 4, 8, 16, 32};
  const std::vector<KernelSpec> specs = {KernelSpec::uniform(1.0), KernelSpec::truncated_gaussian(1.0, 2.0)};
  double worst_short = 0.0, worst_long = INFINITY;
  for (const auto& spec : specs) {
    const double dx = spec.support / 40.0;
    const auto k = validate_kernel(spec, dx);
    for (double d1 : {0.5, 1.0, 2.0}) {
      const auto curve = eigen_curve(k, d1, lengths, dx);
      for (std::size_t i = 1; i < curve.size(); ++i)
        o.require(curve[i].second > curve[i - 1].second,
                  to_string(spec.form) + " d1=" + num(d1) + " not increasing at l=" + num(curve[i].first));
      const double shortest = principal_eigenvalue(k, d1, 0.0, 1e-3, dx).lambda_p;
      worst_short = std::max(worst_short, std::abs(shortest + d1));
      o.require(std::abs(shortest + d1) <= 1e-3, "lambda_p(1e-3) = " + num(shortest));
      const double longest = principal_eigenvalue(k, d1, 0.0, 64.0, dx).lambda_p;
      worst_long = std::min(worst_long, longest / d1);
      o.require(longest > -0.06 * d1, "lambda_p(64) = " + num(longest));
      for (double a : {-5.25, 3.5, 100.0})
        for (double l : {1.0, 4.0}) {
          const double shifted = principal_eigenvalue(k, d1, a, a + l, dx).lambda_p;
          const double origin = principal_eigenvalue(k, d1, 0.0, l, dx).lambda_p;
          o.require(shifted == origin, "translation by " + num(a) + " changed lambda_p");
        }
    }
  }
  o.notes << "max |lambda_p(1e-3) + d1| = " << num(worst_short) << ", min lambda_p(64)/d1 = "
          << num(worst_long);
  return o;
}

Outcome rank_one() {
  Outcome o;
  const auto k = validate_kernel(KernelSpec::uniform(1.0), 1.0 / 40.0);
  const double lambda = principal_eigenvalue(k, 1.0, 0.0, 1.0, 1.0 / 40.0).lambda_p;
  const double analytic = 1.0 * (1.0 * k.evaluate(0.0) - 1.0);
  o.require(std::abs(lambda - analytic) <= 1e-10, "lambda_p = " + num(lambda));
  o.notes << "lambda_p = " << format_double(lambda) << " vs " << num(analytic);
  return o;
}

Outcome theta_cross_check() {
  Outcome o;
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> unit(std::log(1e-2), std::log(1e2));
  const auto draw = [&] { return std::exp(unit(rng)); };
  int checked = 0, mismatches = 0, sufficient_hits = 0, sufficient_bad = 0, theta2 = 0;
  while (checked < 10000) {
    ModelParams p;
    p.gamma = draw();
    p.h_comp = draw();
    p.k = draw();
    p.d1 = draw();
    p.d2 = draw();
    if (!(p.d1_tilde() > 0.0)) continue;
    ++checked;
    const auto t = theta_classify(p);
    if (!t.verdict_closed_form || *t.verdict_closed_form != t.verdict_roots) ++mismatches;
    if (t.verdict_roots == Theta::Theta2) ++theta2;
    if (t.sufficient_condition_hit) {
      ++sufficient_hits;
      if (t.verdict_roots != Theta::Theta1) ++sufficient_bad;
    }
  }
  o.require(mismatches == 0, std::to_string(mismatches) + " verdict mismatches");
  o.require(sufficient_bad == 0, std::to_string(sufficient_bad) + " sufficient-condition hits outside Theta1");

  ModelParams w;
  w.gamma = 1;
  w.h_comp = 2;
  w.k = 2;
  w.d1 = 0.1;
  w.d2 = 0.05;
  const auto t = theta_classify(w);
  o.require(t.verdict_roots == Theta::Theta2, "worked tuple is not Theta2");
  o.require(t.roots_in_unit_interval.size() == 2, "worked tuple root count");
  if (t.roots_in_unit_interval.size() == 2) {
    o.require(std::abs(t.roots_in_unit_interval[0] - 0.8) <= 1e-9, "first root");
    o.require(std::abs(t.roots_in_unit_interval[1] - 11.0 / 12.0) <= 1e-9, "second root");
  }
  if (t.verdict_roots == Theta::Theta2) o.require(std::abs(x_star(t) - 0.8) <= 1e-9, "x_star");
  o.notes << checked << " tuples, " << theta2 << " in Theta2, " << sufficient_hits << " sufficient-condition hits";
  return o;
}

Outcome ode_cases() {
  Outcome o;
  struct Case {
    const char* name;
    double k, h;
    Eigen::Vector2d init, target;
  };
  const double rs = 2.0 / 3.0;
  const std::vector<Case> cases = {
      {"R0 unstable", 0.5, 0.5, {1e-4, 1e-4}, {rs, rs}},
      {"weak", 0.5, 0.5, {0.1, 0.9}, {rs, rs}},
      {"k<1<h", 0.5, 2.0, {0.1, 0.9}, {1.0, 0.0}},
      {"h<1<k", 2.0, 0.5, {0.9, 0.1}, {0.0, 1.0}},
      {"strong, u side", 2.0, 2.0, {0.8, 0.2}, {1.0, 0.0}},
      {"strong, v side", 2.0, 2.0, {0.2, 0.8}, {0.0, 1.0}},
  };
  double worst = 0.0;
  for (const auto& c : cases) {
    ModelParams p;
    p.k = c.k;
    p.h_comp = c.h;
    const auto traj = ode_trajectory(p, c.init, 300.0, 0.01);
    const double err = (traj.final_state() - c.target).cwiseAbs().maxCoeff();
    worst = std::max(worst, err);
    o.require(err <= 1e-6, std::string(c.name) + " ended " + num(err) + " away");
  }
  o.notes << cases.size() << " trajectories, worst distance " << num(worst);
  return o;
}

Outcome attractor_iteration() {
  Outcome o;
  const auto weak = attractor_bounds(0.5, 0.5, 60);
  const double rs = 2.0 / 3.0;
  double err = 0.0;
  for (const auto* seq : {&weak.u_lower, &weak.v_upper, &weak.u_upper, &weak.v_lower})
    err = std::max(err, seq->empty() ? INFINITY : std::abs(seq->back() - rs));
  o.require(weak.outcome == AttractorOutcome::CoexistenceLimits, "weak case outcome");
  o.require(err <= 1e-10, "weak bounds off by " + num(err));
  const auto dom = attractor_bounds(0.5, 2.0, 60);
  o.require(dom.outcome == AttractorOutcome::UDominance && dom.dominance_step == 1, "u-dominance step");
  o.notes << "weak error at j=60: " << num(err) << ", dominance at j = " << dom.dominance_step;
  return o;
}

Outcome spreading(const std::string& label, const std::vector<std::string>& overrides, const Eigen::Vector2d& target) {
  Outcome o;
  const auto config = scenario(overrides);
  const auto r = simulate_scenario(config);
  record_audit(label, r);
  o.require(r.regime.regime == Regime::Spreading, "regime " + to_string(r.regime.regime));
  o.require(r.run.front_monotone, "fronts not monotone");
  o.require(r.regime.h_rate > 0.0 && r.regime.g_rate > 0.0, "fronts not advancing");
  const Eigen::Vector2d center = r.run.final_state.at(0.0);
  const double err = (center - target).cwiseAbs().maxCoeff();
  o.require(err <= 1e-2, "center off by " + num(err));
  const auto* c = find_check(r, "spreading_center_limit");
  o.require(c && c->pass, "center check");
  o.notes << "dt " << num(config.numerics.dt) << ", fronts [" << num(r.regime.g_final) << ", "
          << num(r.regime.h_final) << "], (u, v)(T, 0) = (" << num(center(0)) << ", " << num(center(1))
          << ")";
  return o;
}

Outcome vanishing() {
  Outcome o;
  double mu = 0.05;
  std::optional<ScenarioResult> found;
  int attempts = 0;
  for (; attempts < 20 && !found; ++attempts, mu *= 0.5) {
    const auto config = scenario(with(kBaseRun, {"params.mu=" + format_double(mu), "params.h0=0.2", "params.d1=1.2"}));
    auto r = simulate_scenario(config);
    if (r.regime.regime == Regime::Vanishing) found = std::move(r);
  }
  if (!found) {
    o.require(false, "no vanishing run found");
    return o;
  }
  const ScenarioResult& r = *found;
  record_audit("vanishing", r);
  const ModelParams p = scenario(with(kBaseRun, {"params.h0=0.2", "params.d1=1.2"})).params;
  o.require(p.d1 > 1.0 - p.k, "d1 > 1 - k");
  for (const char* name : {"vanishing_d1_gt_1_minus_k", "vanishing_lambda_p", "vanishing_mass_decay", "vanishing_v_outside_fronts"}) {
    const auto* c = find_check(r, name);
    o.require(c && c->pass, name);
  }
  const double decay = r.regime.peak_mass / std::max(r.regime.final_mass, 1e-300);
  o.require(decay >= 100.0, "mass decay " + num(decay));

  const auto& s = r.run.final_state;
  const double C = 2.0 * p.h0;
  const Eigen::VectorXd dev = (s.v.array() - 1.0).abs().matrix();
  const double g = *r.regime.g_inf_est, h = *r.regime.h_inf_est;
  const double v_dev = integrate(s.grid, dev, -C, std::min(C, g)) + integrate(s.grid, dev, std::max(-C, h), C);
  o.require(v_dev < 5e-2, "v_dev " + num(v_dev));

  const auto j1 = validate_kernel(KernelSpec::uniform(1.0), 0.025);
  const double lambda = principal_eigenvalue(j1, p.d1, g, h, 0.025).lambda_p;
  o.require(lambda <= p.k - 1.0 + 5e-3, "lambda_p " + num(lambda));
  o.notes << "mu = " << num(2.0 * mu) << " after " << attempts << " attempt(s), interval (" << num(g) << ", "
          << num(h) << "), lambda_p = " << num(lambda) << ", decay x" << num(decay) << ", v_dev = " << num(v_dev);
  return o;
}

Outcome structural() {
  Outcome o;
  if (g_audits.empty()) o.require(false, "no acceptance runs recorded");
  for (const auto& a : g_audits) {
    o.require(a.clamps_zero, a.name + " clamps");
    o.require(a.support, a.name + " support discipline");
    o.require(a.monotone, a.name + " front monotonicity");
    o.require(a.comparison, a.name + " comparison bound");
    o.require(a.halving, a.name + " dt halving " + num(a.halving_change));
    o.notes << a.name << ": comparison margin " << num(a.comparison_margin) << ", dt-halving change "
            << num(a.halving_change) << "; ";
  }
  return o;
}

Outcome scaling() {
  Outcome o;
  GeneralParams g;
  g.D1 = 1.5;
  g.D2 = 0.7;
  g.a1 = 1.6;
  g.b1 = 1.3;
  g.c1 = 0.6;
  g.a2 = 1.1;
  g.b2 = 0.8;
  g.c2 = 0.9;
  g.mu_hat = 2.5;
  g.H0 = 1.5;
  const auto [p, tr] = reduce_general(g);
  const double dx = 0.025;
  const auto k = validate_kernel(KernelSpec::uniform(1.0), dx);
  const double v0 = 0.9;
  const auto reduced = init_state(p, k, k, CosineBump{1.0}, ConstantProfile{v0}, dx, 4.0);
  const auto general = init_state(g, k, k, CosineBump{1.0 / tr.u_scale}, ConstantProfile{v0 / tr.v_scale}, dx, 4.0);

  RunOptions ro;
  ro.T = 40.0;
  ro.dt = 0.01;
  ro.field_every = 5.0;
  RunOptions go = ro;
  go.T = ro.T / tr.time_scale;
  go.dt = ro.dt / tr.time_scale;
  go.snapshot_every = ro.snapshot_every / tr.time_scale;
  go.field_every = ro.field_every / tr.time_scale;

  std::vector<SimState> rs, gs;
  run(reduced, ro, [&](const SimState& s) { rs.push_back(s); });
  run(general, go, [&](const SimState& s) { gs.push_back(s); });
  o.require(rs.size() == gs.size() && rs.size() > 2, "matched snapshot count");

  double worst = 0.0;
  for (std::size_t n = 0; n < std::min(rs.size(), gs.size()); ++n) {
    const auto& a = rs[n];
    const auto& b = gs[n];
    o.require(std::abs(a.t - b.t * tr.time_scale) < 1e-9, "snapshot times");
    worst = std::max({worst, std::abs(a.g_front - b.g_front), std::abs(a.h_front - b.h_front)});
    for (Index i = 0; i < a.grid.count; ++i) {
      const double x = a.grid.x(i);
      const Index j = b.grid.nearest(x);
      const bool shared = std::abs(b.grid.x(j) - x) < 1e-9;
      const double bu = shared ? b.u(j) : 0.0;
      const double bv = shared ? b.v(j) : b.v(x < 0 ? 0 : b.grid.count - 1);
      worst = std::max({worst, std::abs(a.u(i) - tr.u_scale * bu), std::abs(a.v(i) - tr.v_scale * bv)});
    }
  }
  o.require(worst < 5e-3, "max difference " + num(worst));
  o.notes << rs.size() << " matched times, max-norm difference " << num(worst);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* label;
    std::function<Outcome()> run;
  };
  const Eigen::Vector2d coexist(2.0 / 3.0, 2.0 / 3.0);
  const std::vector<Criterion> criteria = {
      {"AC1 principal eigenvalue suite", eigen_suite},
      {"AC2 rank-one eigenvalue", rank_one},
      {"AC3 Theta cross-check", theta_cross_check},
      {"AC4 ODE attractors", ode_cases},
      {"AC5 attractor-bound iteration", attractor_iteration},
      {"AC6 spreading with coexistence", [&] { return spreading("coexistence", kBaseRun, coexist); }},
      {"AC7 spreading with exclusion",
       [&] {
         return spreading("exclusion", with(kBaseRun, {"params.h_comp=2", "numerics.dt=0.01"}),
                          Eigen::Vector2d(1.0, 0.0));
       }},
      {"AC8 vanishing consistency", vanishing},
      {"AC9 structural invariants", structural},
      {"AC10 scaling equivalence", scaling},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.notes << " [exception: " << e.what() << "]";
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::printf("%s %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", c.label, seconds, o.notes.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
