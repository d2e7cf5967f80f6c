/*
 * Copyright 2026 The es-unicycle Authors. All rights reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

#include "esu/dynamics.hpp"
#include "esu/errors.hpp"
#include "esu/scenario.hpp"

using namespace esu;

namespace {

SimConfig make_config(Vec2 x0, double t_end, double Omega, int k, int spp = 200) {
  SimConfig c;
  c.x0 = x0;
  c.t_end = t_end;
  c.Omega = Omega;
  c.k = k;
  c.steps_per_fast_period = spp;
  return c;
}

ControlLaw unscaled(LawKind kind, double vartheta, int k, double Omega) {
  return ControlLaw(kind, builtin_pair(kind), vartheta, k, Omega, 1.0);
}

const CostFunction kOrigin(1.0, TargetPath::constant({0.0, 0.0}));

}  // namespace

TEST_CASE("closed-loop grid lands on t_end") {
  const auto cfg = make_config({0, 0}, 1.0, 5.0, 10);
  const TimeGrid g = closed_loop_grid(cfg);
  CHECK(g.time(g.steps) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(g.h <= cfg.fast_period() / cfg.steps_per_fast_period);
}

TEST_CASE("zero control keeps the state fixed") {
  FPair zero{[](double) { return 0.0; }, [](double) { return 0.0; }, [](double) { return 0.0; }, {}, ""};
  const ControlLaw law(LawKind::Custom, zero, 1.0, 10, 5.0);
  const ClosedLoopSystem sys(law, kOrigin, make_config({0.3, -0.4}, 2.0, 5.0, 10));
  const auto traj = simulate_closed_loop(sys);
  for (const auto& s : traj.samples) {
    CHECK(s.x == Vec2{0.3, -0.4});
    CHECK(s.u == 0.0);
  }
}

TEST_CASE("sim-moving Cont1: bounded tracking error after the transient") {
  const auto setup = find_scenario("sim-moving")->setup(LawKind::Cont1);
  const auto traj = simulate_closed_loop(setup.system());
  CHECK(traj.front().err == doctest::Approx(std::sqrt(2.0)));
  double tail = 0.0;
  for (const auto& s : traj.samples)
    if (s.t >= 30.0) tail = std::max(tail, s.err);
  CHECK(tail < 1.0);
  CHECK(traj.back().t == doctest::Approx(100.0));
}

TEST_CASE("exp-fixed Cont4 reduces the tracking error over 200 s") {
  const auto setup = find_scenario("exp-fixed")->setup(LawKind::Cont4);
  CHECK(setup.config.k == 2);
  CHECK(setup.config.Omega == 1.5);
  const auto traj = simulate_closed_loop(setup.system());
  CHECK(traj.back().t - traj.front().t == doctest::Approx(200.0));
  CHECK(traj.back().err < traj.front().err);
}

TEST_CASE("divergence carries the partial trajectory") {
  const auto law = make_builtin_law(LawKind::Cont1, 1.0, 10, 5.0);
  const ClosedLoopSystem sys(law, kOrigin, make_config({1000.0, 0.0}, 10.0, 5.0, 10));
  try {
    simulate_closed_loop(sys);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.partial().size() >= 1);
    CHECK(e.partial().front().x == Vec2{1000.0, 0.0});
  }
}

TEST_CASE("closed loop rejects mismatched law and config") {
  const auto law = make_builtin_law(LawKind::Cont1, 1.0, 10, 5.0);
  CHECK_THROWS_AS(ClosedLoopSystem(law, kOrigin, make_config({1, 0}, 1.0, 5.0, 20)), ParameterError);
}

TEST_CASE("determinism: identical inputs give bit-identical trajectories") {
  const auto setup = find_scenario("sim-moving")->setup(LawKind::Cont4);
  auto sys = setup.system();
  const auto a = simulate_closed_loop(sys);
  const auto b = simulate_closed_loop(sys);
  REQUIRE(a.size() == b.size());
  bool same = true;
  for (std::size_t i = 0; i < a.size(); ++i)
    same = same && a.samples[i].x == b.samples[i].x && a.samples[i].u == b.samples[i].u;
  CHECK(same);
}

TEST_CASE("RK4 refinement: observed order >= 3.5") {
  const auto law = make_builtin_law(LawKind::Cont2, 1.0, 10, 5.0);
  std::vector<Vec2> ends;
  for (int spp : {10, 20, 40, 80}) {
    const ClosedLoopSystem sys(law, kOrigin, make_config({1.0, 0.0}, 2.0, 5.0, 10, spp));
    ends.push_back(simulate_closed_loop(sys).back().x);
  }
  const double d1 = norm(ends[0] - ends[1]);
  const double d2 = norm(ends[1] - ends[2]);
  const double d3 = norm(ends[2] - ends[3]);
  MESSAGE("differences " << d1 << " " << d2 << " " << d3);
  CHECK(std::log2(d1 / d2) >= 3.5);
  CHECK(std::log2(d2 / d3) >= 3.5);
}

TEST_CASE("simulate_averaged: unscaled Cont2 is the gradient flow exp(-2t)") {
  const AveragedSystem sys(unscaled(LawKind::Cont2, 1.0, 10, 5.0), kOrigin);
  const auto traj = simulate_averaged(sys, {1.0, 0.0}, 0.0, 5.0, 1e-3);
  for (const auto& s : traj.samples) {
    CHECK(std::abs(s.x.x1 - std::exp(-2.0 * s.t)) < 1e-6);
    CHECK(s.x.x2 == 0.0);
    CHECK(s.u == 0.0);
    CHECK(s.theta == 0.0);
  }
}

TEST_CASE("simulate_averaged: the target is an equilibrium for Cont3 and Cont4") {
  const CostFunction c(2.0, TargetPath::constant({0.5, 0.7}));
  for (auto kind : {LawKind::Cont3, LawKind::Cont4}) {
    const AveragedSystem sys(make_builtin_law(kind, 1.0, 10, 5.0), c);
    for (const auto& s : simulate_averaged(sys, {0.5, 0.7}, 0.0, 3.0, 1e-2).samples)
      CHECK(s.x == Vec2{0.5, 0.7});
  }
}

TEST_CASE("simulate_averaged: Cont1 on LineSine settles below lambda_min") {
  // dJ/dt <= -4 kappa vartheta J + 2 sqrt(kappa J) nu, so J ends below nu^2 / (4 kappa vartheta^2).
  const CostFunction c(1.0, TargetPath::line_sine());
  const AveragedSystem sys(make_builtin_law(LawKind::Cont1, 1.0, 10, 5.0), c);
  const double nu = target_speed_bound(c.path(), 0.0, 100.0);
  const double lambda_min = nu * nu / 4.0;
  const auto traj = simulate_averaged(sys, {-1.0, 1.0}, 0.0, 100.0, 1e-2);
  for (const auto& s : traj.samples)
    if (s.t >= 30.0) CHECK(s.J <= lambda_min * (1.0 + 1e-6));
}

TEST_CASE("simulate_averaged: field failure reports the time") {
  FPair p = builtin_pair(LawKind::Cont1);
  p.dsum = [](double z) { return z < 0.5 ? std::nan("") : 2.0 * z; };
  const AveragedSystem sys(ControlLaw(LawKind::Custom, p, 1.0, 10, 5.0), kOrigin);
  try {
    simulate_averaged(sys, {1.0, 0.0}, 0.0, 5.0, 1e-2);
    FAIL("expected a domain error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("t = ") != std::string::npos);
  }
}

TEST_CASE("first-order dither integrals vanish over a period") {
  for (int k : {2, 3, 10}) {
    const auto I = input_iterated_integrals(k, 0.3, 1.1);
    for (double f : I.first) CHECK(std::abs(f) < 1e-10);
    CHECK(I.length == doctest::Approx(2.0 * kPi * k));
  }
}

TEST_CASE("averaged_field_numeric examples") {
  const auto c2 = unscaled(LawKind::Cont2, 1.0, 10, 5.0);
  const Vec2 f = averaged_field_numeric(c2, kOrigin, {1.0, 0.0}, 0.0);
  CHECK(std::abs(f.x1 + 2.0) < 1e-6);
  CHECK(std::abs(f.x2) < 1e-6);

  const auto c3 = make_builtin_law(LawKind::Cont3, 1.0, 10, 5.0);
  CHECK(norm(averaged_field_numeric(c3, kOrigin, {0.0, 0.0}, 0.0)) == 0.0);
  CHECK(norm(averaged_field(c3, kOrigin, {0.0, 0.0}, 0.0)) == 0.0);
}

TEST_CASE("averaged_field_numeric matches the closed form at random states") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const CostFunction c(1.0, TargetPath::line_sine());
  for (auto kind : {LawKind::Cont1, LawKind::Cont2, LawKind::Cont3, LawKind::Cont4}) {
    for (int k : {2, 10}) {
      const auto law = make_builtin_law(kind, 1.0, k, 5.0);
      const auto I = input_iterated_integrals(k);
      for (int i = 0; i < 20; ++i) {
        const double t = 10.0 + U(rng);
        const Vec2 x = c.path().eval(t) + Vec2{U(rng), U(rng)};
        if (in_guard_band(law.pair(), c.eval(x, t))) continue;
        CHECK(norm(averaged_field_numeric(law, c, x, t, I) - averaged_field(law, c, x, t)) < 1e-6);
      }
    }
  }
}

TEST_CASE("one_period_map examples") {
  const auto c4 = make_builtin_law(LawKind::Cont4, 1.0, 10, 5.0);
  const ClosedLoopSystem at_target(c4, kOrigin, make_config({0.0, 0.0}, 10.0, 5.0, 10));
  const auto r = one_period_map(at_target, {0.0, 0.0}, 0.0);
  CHECK(r.r_norm == 0.0);
  CHECK(r.x_exact == Vec2{0.0, 0.0});

  // Remainder shrinks as omega grows (k fixed).
  const auto c2 = make_builtin_law(LawKind::Cont2, 1.0, 10, 5.0);
  const ClosedLoopSystem lo(c2, kOrigin, make_config({1.0, 0.0}, 10.0, 5.0, 10));
  const auto c2hi = c2.with_Omega(80.0);
  const ClosedLoopSystem hi(c2hi, kOrigin, make_config({1.0, 0.0}, 10.0, 80.0, 10));
  CHECK(one_period_map(hi, {1.0, 0.0}, 0.0).r_norm < one_period_map(lo, {1.0, 0.0}, 0.0).r_norm);
}
