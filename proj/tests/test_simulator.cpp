#include <doctest.h>

#include <cmath>
#include <string>

#include "nlfb/diagnostics.hpp"
#include "nlfb/simulator.hpp"
#include "test_support.hpp"

using namespace nlfb;

namespace {

ValidatedKernel uniform_kernel(double dx) { return validate_kernel(KernelSpec::uniform(1.0), dx); }

ModelParams with_h0(double h0) {
  ModelParams p;
  p.h0 = h0;
  return p;
}

SimState make_state(const ModelParams& p, double dx, const Profile& v0 = ConstantProfile{1.0}, double pad = 3.0) {
  const auto k = uniform_kernel(dx);
  return init_state(p, k, k, CosineBump{1.0}, v0, dx, pad);
}

std::pair<Index, Index> inside(const SimState& s) {
  Index a = 0;
  while (a < s.grid.count && s.grid.x(a) <= s.g_front) ++a;
  Index b = s.grid.count;
  while (b > 0 && s.grid.x(b - 1) >= s.h_front) --b;
  return {a, b};
}

}  // namespace

TEST_CASE("init_state example") {
  const auto s = make_state(with_h0(1.0), 0.025);
  CHECK(s.g_front == -1.0);
  CHECK(s.h_front == 1.0);
  CHECK(s.at(0.0)(0) == 1.0);
  CHECK(s.at(0.0)(1) == 1.0);
  CHECK(s.grid.x_min() <= -4.0);
  CHECK(s.grid.x_max() >= 4.0);
  CHECK(s.u(s.grid.nearest(1.0)) == 0.0);
  CHECK(s.u(s.grid.nearest(-1.0)) == 0.0);
  CHECK(s.t == 0.0);
  CHECK(s.audit.clamp_count == 0);
}

TEST_CASE("init_state rejects bad initial data") {
  const auto k = uniform_kernel(0.05);
  const ModelParams p = with_h0(1.0);
  const TabulatedProfile negative{{-1.0, 0.0, 1.0}, {0.0, -0.2, 0.0}};
  CHECK(test::error_code_of([&] { init_state(p, k, k, negative, ConstantProfile{1.0}, 0.05, 2.0); }) ==
        ErrorCode::InvalidInitialU);
  const TabulatedProfile wide{{-1.5, 0.0, 1.5}, {0.1, 1.0, 0.1}};
  CHECK(test::error_code_of([&] { init_state(p, k, k, wide, ConstantProfile{1.0}, 0.05, 2.0); }) ==
        ErrorCode::InvalidInitialU);
  CHECK(test::error_code_of([&] { init_state(p, k, k, ConstantProfile{1.0}, ConstantProfile{1.0}, 0.05, 2.0); }) ==
        ErrorCode::InvalidInitialU);
  CHECK(test::error_code_of([&] { init_state(p, k, k, CosineBump{1.0}, ConstantProfile{-0.1}, 0.05, 2.0); }) ==
        ErrorCode::InvalidInitialV);
  const TabulatedProfile tent{{-1.0, 0.0, 1.0}, {0.0, 0.7, 0.0}};
  const auto s = init_state(p, k, k, tent, ConstantProfile{1.0}, 0.05, 2.0);
  CHECK(s.at(0.0)(0) == doctest::Approx(0.7));
  CHECK(s.at(0.5)(0) == doctest::Approx(0.35));
}

TEST_CASE("front speed examples") {
  auto s = make_state(with_h0(2.0125), 0.025);
  const auto [a, b] = inside(s);
  s.u.setZero();
  auto [g0, h0] = front_speeds(s);
  CHECK(g0 == 0.0);
  CHECK(h0 == 0.0);

  s.u.segment(a, b - a).setOnes();
  const double mu = s.coeffs.mu_hat;
  const auto [g1, h1] = front_speeds(s);
  CHECK(std::abs(h1 - mu / 4.0) < 1e-12);
  CHECK(std::abs(g1 + mu / 4.0) < 1e-12);
}

TEST_CASE("step examples") {
  const double dt = 0.01;
  auto rest = make_state(with_h0(1.0), 0.05);
  rest.u.setZero();
  const auto after = step(rest, dt);
  CHECK(after.g_front == rest.g_front);
  CHECK(after.h_front == rest.h_front);
  CHECK(after.u.cwiseAbs().maxCoeff() == 0.0);
  CHECK((after.v.array() - 1.0).abs().maxCoeff() < 1e-14);
  CHECK(after.t == dt);

  auto half = make_state(with_h0(1.0), 0.05, ConstantProfile{0.5});
  half.u.setZero();
  const auto next = step(half, dt);
  CHECK((next.v.array() - (0.5 + dt * 0.25)).abs().maxCoeff() < 1e-14);

  ModelParams p = with_h0(0.06);
  p.d1 = 1.0;
  auto one = make_state(p, 0.1, ConstantProfile{0.0});
  const auto [a, b] = inside(one);
  REQUIRE(b - a == 1);
  one.u(a) = 0.5;
  const auto [u_t, v_t] = field_rates(one);
  CHECK(u_t(a) == doctest::Approx(1.0 * (0.5 * 0.5 * 0.1 - 0.5) + 0.5 * (1.0 - 0.5)).epsilon(1e-14));
  CHECK(u_t(a) == doctest::Approx(-0.225).epsilon(1e-14));
  CHECK(v_t.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("step rejects an unstable dt") {
  const auto s = make_state(with_h0(1.0), 0.05);
  CHECK(test::error_code_of([&] { step(s, 50.0); }) == ErrorCode::StabilityViolated);
  RunOptions opts;
  opts.T = 100.0;
  opts.dt = 50.0;
  try {
    run(s, opts);
    FAIL("expected StabilityViolated");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::StabilityViolated);
    CHECK(std::string(e.what()).find("t = 50") != std::string::npos);
  }
}

TEST_CASE("run with T = 0 records the initial sample only") {
  const auto s = make_state(with_h0(1.0), 0.05);
  RunOptions opts;
  opts.T = 0.0;
  int calls = 0;
  const auto r = run(s, opts, [&](const SimState&) { ++calls; });
  CHECK(r.series.size() == 1);
  CHECK(r.series.t[0] == 0.0);
  CHECK(r.final_state.t == 0.0);
  CHECK(calls >= 1);
  CHECK(test::error_code_of([&] {
          RunOptions bad;
          bad.T = -1.0;
          run(s, bad);
        }) == ErrorCode::InvalidArgument);
}

TEST_CASE("run samples on the snapshot interval and ends at T") {
  const auto s = make_state(with_h0(1.0), 0.05);
  RunOptions opts;
  opts.T = 2.0;
  opts.dt = 0.02;
  opts.snapshot_every = 0.5;
  const auto r = run(s, opts);
  REQUIRE(r.series.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(r.series.t[i] == doctest::Approx(0.5 * static_cast<double>(i)));
  CHECK(r.final_state.t == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("stable dt formula") {
  ModelParams p;
  CHECK(stable_dt(p) == doctest::Approx(0.2 / (1.0 + 1.0 + 1.0 * 3.5 + 3.5)));
}

TEST_CASE("reduce_general examples") {
  ModelParams p;
  p.d1 = 0.7;
  p.d2 = 1.3;
  p.k = 0.4;
  p.h_comp = 1.6;
  p.gamma = 2.5;
  p.mu = 3.0;
  p.h0 = 1.5;
  const auto [reduced, tr] = reduce_general(GeneralParams::from_reduced(p));
  CHECK(reduced.d1 == doctest::Approx(p.d1));
  CHECK(reduced.d2 == doctest::Approx(p.d2));
  CHECK(reduced.k == doctest::Approx(p.k));
  CHECK(reduced.h_comp == doctest::Approx(p.h_comp));
  CHECK(reduced.gamma == doctest::Approx(p.gamma));
  CHECK(reduced.mu == doctest::Approx(p.mu));
  CHECK(reduced.h0 == p.h0);
  CHECK(tr.u_scale == 1.0);
  CHECK(tr.time_scale == 1.0);

  GeneralParams g;
  g.D1 = 2.0;
  g.a1 = 2.0;
  const auto [r2, tr2] = reduce_general(g);
  CHECK(r2.d1 == 1.0);
  CHECK(tr2.time_scale == 2.0);

  g.c2 = 0.0;
  CHECK(test::error_code_of([&] { reduce_general(g); }) == ErrorCode::NonPositiveParameter);
}

TEST_CASE("property: positivity, monotone fronts, support discipline and comparison bound") {
  for (int trial = 0; trial < 12; ++trial) {
    ModelParams p;
    p.d1 = test::log_uniform(0.2, 3.0);
    p.d2 = test::log_uniform(0.2, 3.0);
    p.k = test::log_uniform(0.2, 3.0);
    p.h_comp = test::log_uniform(0.2, 3.0);
    p.gamma = test::log_uniform(0.2, 3.0);
    p.mu = test::log_uniform(0.2, 10.0);
    p.h0 = test::uniform(0.3, 2.0);
    const double v0 = test::uniform(0.0, 1.5);
    const double dx = 0.05;
    const auto k1 = uniform_kernel(dx);
    const auto k2 = validate_kernel(KernelSpec::triangular(test::uniform(0.5, 2.0)), dx);
    const auto s = init_state(p, k1, k2, CosineBump{test::uniform(0.1, 1.5)}, ConstantProfile{v0}, dx, 2.0);
    RunOptions opts;
    opts.T = 8.0;
    opts.dt = stable_dt(p);
    opts.snapshot_every = 0.5;
    int observed = 0;
    bool inside_ok = true;
    const auto r = run(s, opts, [&](const SimState& st) {
      ++observed;
      inside_ok = inside_ok && st.u.minCoeff() >= 0.0 && st.v.minCoeff() >= 0.0;
    });
    CHECK(r.final_state.audit.clamp_count == 0);
    CHECK(r.front_monotone);
    CHECK(r.support_discipline);
    CHECK(inside_ok);
    CHECK(r.final_state.u.minCoeff() >= 0.0);
    CHECK(r.final_state.v.minCoeff() >= 0.0);
    const auto bound = comparison_bound_check(r.series, v0, p.gamma);
    CHECK(bound.holds);
    for (std::size_t i = 1; i < r.series.size(); ++i) {
      CHECK(r.series.h_front[i] >= r.series.h_front[i - 1]);
      CHECK(r.series.g_front[i] <= r.series.g_front[i - 1]);
    }
  }
}

TEST_CASE("property: runs are deterministic") {
  const auto s = make_state(with_h0(1.0), 0.05);
  RunOptions opts;
  opts.T = 3.0;
  opts.dt = 0.02;
  const auto a = run(s, opts);
  const auto b = run(s, opts);
  CHECK(a.final_state.u == b.final_state.u);
  CHECK(a.final_state.v == b.final_state.v);
  CHECK(a.final_state.h_front == b.final_state.h_front);
}

TEST_CASE("property: unreduced and reduced runs agree after rescaling") {
  for (int trial = 0; trial < 3; ++trial) {
    GeneralParams g;
    g.D1 = test::log_uniform(0.5, 2.0);
    g.D2 = test::log_uniform(0.5, 2.0);
    g.a1 = test::log_uniform(0.5, 2.0);
    g.b1 = test::log_uniform(0.5, 2.0);
    g.c1 = test::log_uniform(0.2, 1.0);
    g.a2 = test::log_uniform(0.5, 2.0);
    g.b2 = test::log_uniform(0.5, 2.0);
    g.c2 = test::log_uniform(0.2, 1.0);
    g.mu_hat = test::log_uniform(0.5, 4.0);
    g.H0 = 1.0;
    const auto [p, tr] = reduce_general(g);
    const double dx = 0.05;
    const auto k = uniform_kernel(dx);

    const double v_reduced = 0.8;
    const auto reduced = init_state(p, k, k, CosineBump{1.0}, ConstantProfile{v_reduced}, dx, 2.0);
    const auto general = init_state(g, k, k, CosineBump{1.0 / tr.u_scale}, ConstantProfile{v_reduced / tr.v_scale},
                                    dx, 2.0);

    RunOptions ro;
    ro.T = 6.0;
    ro.dt = 0.5 * stable_dt(p);
    RunOptions go = ro;
    go.T = ro.T / tr.time_scale;
    go.dt = ro.dt / tr.time_scale;
    const auto rr = run(reduced, ro).final_state;
    const auto gr = run(general, go).final_state;

    CHECK(std::abs(rr.h_front - gr.h_front) < 5e-3);
    CHECK(std::abs(rr.g_front - gr.g_front) < 5e-3);
    double worst = 0.0;
    for (Index i = 0; i < rr.grid.count; ++i) {
      const double x = rr.grid.x(i);
      const Index j = gr.grid.nearest(x);
      if (std::abs(gr.grid.x(j) - x) > 1e-9) continue;
      worst = std::max(worst, std::abs(rr.u(i) - tr.u_scale * gr.u(j)));
      worst = std::max(worst, std::abs(rr.v(i) - tr.v_scale * gr.v(j)));
    }
    CHECK(worst < 5e-3);
  }
}
