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

#include "esu/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace esu {
namespace {

// f_1..f_4 evaluated at a state whose cost value is J.
std::array<Vec2, 4> input_fields(const ControlLaw& law, double J) {
  const double a = law.gain() / std::sqrt(law.omega());
  const double f1 = a * law.pair().F1(J);
  const double f2 = a * law.pair().F2(J);
  return {Vec2{f1, 0.0}, Vec2{f2, 0.0}, Vec2{0.0, f1}, Vec2{0.0, f2}};
}

// L_{f_k} f_j (y) for all j, k by central differences along f_k.
template <class CostAt>
std::array<std::array<Vec2, 4>, 4> lie_derivatives(const ControlLaw& law, const CostAt& cost_at,
                                                   const Vec2& y) {
  constexpr double h = kFdStep;
  const auto f = input_fields(law, cost_at(y));
  std::array<std::array<Vec2, 4>, 4> L{};
  for (int k = 0; k < 4; ++k) {
    const auto plus = input_fields(law, cost_at(y + h * f[k]));
    const auto minus = input_fields(law, cost_at(y - h * f[k]));
    for (int j = 0; j < 4; ++j) L[k][j] = (plus[j] - minus[j]) / (2.0 * h);
  }
  return L;
}

void check_singular_band(const ControlLaw& law, double J, const char* who) {
  const auto& pair = law.pair();
  for (double s : pair.singular_points) {
    const double d = std::abs(J - s);
    if (d < kGuardBand && !(d == 0.0 && pair.F1(J) == 0.0 && pair.F2(J) == 0.0)) {
      std::ostringstream os;
      os << who << ": J = " << J << " lies inside the guard band of the singular point " << s;
      throw DomainError(os.str());
    }
  }
}

IteratedIntegrals iterated_integrals_at(int k, double dither_phase, double heading_phase,
                                        std::size_t intervals) {
  const double length = 2.0 * kPi * k;
  const double delta = length / static_cast<double>(intervals);
  auto inputs = [&](double s) {
    const double c = std::cos(dither_phase + s), sn = std::sin(dither_phase + s);
    const double ch = std::cos(heading_phase + s / k), sh = std::sin(heading_phase + s / k);
    return std::array<double, 4>{c * ch, sn * ch, c * sh, sn * sh};
  };

  IteratedIntegrals out;
  out.length = length;
  std::array<double, 4> V{};  // running int_0^sigma v
  std::array<double, 4> v_prev = inputs(0.0);
  // Outer composite Simpson over the nodes; V(0) = 0 so node 0 contributes nothing.
  for (std::size_t n = 1; n <= intervals; ++n) {
    const double s = static_cast<double>(n) * delta;
    const auto v_mid = inputs(s - 0.5 * delta);
    const auto v_cur = inputs(s);
    for (int j = 0; j < 4; ++j) V[j] += delta / 6.0 * (v_prev[j] + 4.0 * v_mid[j] + v_cur[j]);
    const double w = (n == intervals) ? 1.0 : (n % 2 == 1 ? 4.0 : 2.0);
    for (int kk = 0; kk < 4; ++kk)
      for (int j = 0; j < 4; ++j) out.second[kk][j] += w * v_cur[j] * V[kk];
    v_prev = v_cur;
  }
  for (auto& row : out.second)
    for (double& e : row) e *= delta / 3.0;
  out.first = V;
  return out;
}

}  // namespace

ClosedLoopSystem::ClosedLoopSystem(ControlLaw law, CostFunction cost, SimConfig config)
    : law_(std::move(law)), cost_(std::move(cost)), config_(config) {
  config_.validate();
  if (law_.k() != config_.k || law_.Omega() != config_.Omega)
    throw ParameterError("closed loop: law and config disagree on k or Omega");
}

TimeGrid closed_loop_grid(const SimConfig& config) {
  const double span = config.t_end - config.t0;
  const double h_nominal = config.fast_period() / config.steps_per_fast_period;
  const auto steps = static_cast<std::size_t>(std::ceil(span / h_nominal - 1e-9));
  return {config.t0, span / static_cast<double>(steps), steps};
}

void integrate_closed_loop(const ClosedLoopSystem& sys,
                           const std::function<void(const Sample&)>& observer) {
  const auto& cfg = sys.config();
  const auto& cost = sys.cost();
  const TimeGrid grid = closed_loop_grid(cfg);
  auto rhs = [&sys](double t, const Vec2& x) { return sys.rhs(t, x); };

  Vec2 x = cfg.x0;
  for (std::size_t i = 0;; ++i) {
    const double t = grid.time(i);
    const Vec2 g = cost.path().eval(t);
    const double J = cost.kappa() * squared_norm(x - g);
    observer(Sample{t, x, g, cfg.heading(t), eval_control(sys.law(), t, J), J, norm(x - g)});
    if (i == grid.steps) break;
    x = rk4_step(rhs, t, x, grid.h);
    if (!is_finite(x) || norm(x) > kDivergenceNorm) {
      std::ostringstream os;
      os << "closed loop diverged at t = " << grid.time(i + 1) << " (|x| > " << kDivergenceNorm << ")";
      throw DivergenceError(os.str(), {});
    }
  }
}

Trajectory simulate_closed_loop(const ClosedLoopSystem& sys) {
  Trajectory traj;
  traj.samples.reserve(closed_loop_grid(sys.config()).steps + 1);
  try {
    integrate_closed_loop(sys, [&traj](const Sample& s) { traj.samples.push_back(s); });
  } catch (const DivergenceError& e) {
    throw DivergenceError(e.what(), std::move(traj));
  }
  return traj;
}

Trajectory simulate_averaged(const AveragedSystem& sys, const Vec2& x0, double t0, double t_end,
                             double h) {
  if (!(h > 0.0)) throw ParameterError("simulate_averaged: h must be > 0");
  if (!(t_end > t0)) throw ParameterError("simulate_averaged: t_end must exceed t0");
  const auto steps = static_cast<std::size_t>(std::ceil((t_end - t0) / h - 1e-9));
  const TimeGrid grid{t0, (t_end - t0) / static_cast<double>(steps), steps};
  const auto& cost = sys.cost();
  auto rhs = [&sys](double t, const Vec2& x) { return sys.rhs(t, x); };

  Trajectory traj;
  traj.samples.reserve(steps + 1);
  Vec2 x = x0;
  for (std::size_t i = 0;; ++i) {
    const double t = grid.time(i);
    const Vec2 g = cost.path().eval(t);
    traj.samples.push_back({t, x, g, 0.0, 0.0, cost.kappa() * squared_norm(x - g), norm(x - g)});
    if (i == steps) break;
    try {
      x = rk4_step(rhs, t, x, grid.h);
    } catch (const DomainError& e) {
      std::ostringstream os;
      os << "averaged system: field evaluation failed at t = " << t << ": " << e.what();
      throw DomainError(os.str());
    }
    if (!is_finite(x) || norm(x) > kDivergenceNorm) {
      std::ostringstream os;
      os << "averaged system diverged at t = " << grid.time(i + 1);
      throw DivergenceError(os.str(), std::move(traj));
    }
  }
  return traj;
}

IteratedIntegrals input_iterated_integrals(int k, double dither_phase, double heading_phase) {
  if (k < 2) throw ParameterError("input_iterated_integrals: k must be >= 2");
  const std::size_t n = 1024 * static_cast<std::size_t>(k);
  const IteratedIntegrals fine = iterated_integrals_at(k, dither_phase, heading_phase, n);
  const IteratedIntegrals coarse = iterated_integrals_at(k, dither_phase, heading_phase, n / 2);
  double diff = 0.0;
  for (int i = 0; i < 4; ++i) {
    diff = std::max(diff, std::abs(fine.first[i] - coarse.first[i]));
    for (int j = 0; j < 4; ++j)
      diff = std::max(diff, std::abs(fine.second[i][j] - coarse.second[i][j]));
  }
  if (diff > 1e-9) {
    std::ostringstream os;
    os << "input_iterated_integrals: quadrature not converged (change " << diff << ")";
    throw NumericError(os.str());
  }
  return fine;
}

Vec2 averaged_field_numeric(const ControlLaw& law, const CostFunction& cost, const Vec2& x,
                            double t) {
  return averaged_field_numeric(law, cost, x, t, input_iterated_integrals(law.k()));
}

Vec2 averaged_field_numeric(const ControlLaw& law, const CostFunction& cost, const Vec2& x, double t,
                            const IteratedIntegrals& c) {
  check_singular_band(law, cost.eval(x, t), "averaged_field_numeric");
  auto cost_at = [&cost, t](const Vec2& y) { return cost.eval(y, t); };
  const auto L = lie_derivatives(law, cost_at, x);
  Vec2 sum{};
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      // [f_i, f_j] = L_{f_i} f_j - L_{f_j} f_i
      const Vec2 bracket = L[i][j] - L[j][i];
      sum += (c.second[i][j] / c.length) * bracket;
    }
  return sum;
}

OnePeriodResult one_period_map(const ClosedLoopSystem& sys, const Vec2& x0, double t0) {
  const auto& law = sys.law();
  const auto& cost = sys.cost();
  const auto& cfg = sys.config();
  const double omega = law.omega();
  const double period = 2.0 * kPi * law.k() / omega;

  const Vec2 gamma0 = cost.path().eval(t0);
  const Vec2 xi0 = x0 - gamma0;
  const double J0 = cost.kappa() * squared_norm(xi0);
  check_singular_band(law, J0, "one_period_map");

  // Reference: RK4 ten times finer than the production step.
  const auto steps = static_cast<std::size_t>(law.k()) * 10 *
                     static_cast<std::size_t>(cfg.steps_per_fast_period);
  const double h = period / static_cast<double>(steps);
  auto rhs = [&sys](double t, const Vec2& x) { return sys.rhs(t, x); };
  Vec2 x = x0;
  for (std::size_t i = 0; i < steps; ++i) x = rk4_step(rhs, t0 + static_cast<double>(i) * h, x, h);

  // Truncated expansion in xi = x - gamma, coefficients frozen at xi0.
  const double kappa = cost.kappa();
  auto cost_at = [kappa](const Vec2& y) { return kappa * squared_norm(y); };
  const auto f = input_fields(law, J0);
  const auto L = lie_derivatives(law, cost_at, xi0);
  const IteratedIntegrals I =
      input_iterated_integrals(law.k(), omega * t0, cfg.heading(t0));

  Vec2 xi = xi0 - (cost.path().eval(t0 + period) - gamma0);
  const double root = std::sqrt(omega);
  for (int j = 0; j < 4; ++j) xi += (I.first[j] / root) * f[j];
  for (int k = 0; k < 4; ++k)
    for (int j = 0; j < 4; ++j) xi += (I.second[k][j] / omega) * L[k][j];

  OnePeriodResult out;
  out.x_exact = x;
  out.x_truncated = xi + cost.path().eval(t0 + period);
  out.r_norm = norm(out.x_exact - out.x_truncated);
  return out;
}

}  // namespace esu
