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

#pragma once

#include <array>
#include <cstddef>
#include <functional>

#include "esu/control_family.hpp"
#include "esu/core.hpp"

namespace esu {

inline constexpr double kDivergenceNorm = 1e6;

/// State left the |x| <= 1e6 ball (or became non-finite). Carries the
/// samples recorded up to the failure.
class DivergenceError : public Error {
public:
  DivergenceError(const std::string& what, Trajectory partial)
      : Error(what), partial_(std::move(partial)) {}
  const Trajectory& partial() const { return partial_; }

private:
  Trajectory partial_;
};

/// x' = u (cos theta(t), sin theta(t)) with u = eval_control(law, t, J(x, t)).
class ClosedLoopSystem {
public:
  ClosedLoopSystem(ControlLaw law, CostFunction cost, SimConfig config);

  const ControlLaw& law() const { return law_; }
  const CostFunction& cost() const { return cost_; }
  const SimConfig& config() const { return config_; }

  double control(double t, const Vec2& x) const {
    return eval_control(law_, t, cost_.eval(x, t));
  }
  Vec2 rhs(double t, const Vec2& x) const {
    const double u = control(t, x);
    const double th = config_.heading(t);
    return {u * std::cos(th), u * std::sin(th)};
  }

private:
  ControlLaw law_;
  CostFunction cost_;
  SimConfig config_;
};

/// x' = s^2 (-vartheta grad J + Phi), the Lie-bracket system of the closed loop.
class AveragedSystem {
public:
  AveragedSystem(ControlLaw law, CostFunction cost) : law_(std::move(law)), cost_(std::move(cost)) {}

  const ControlLaw& law() const { return law_; }
  const CostFunction& cost() const { return cost_; }
  Vec2 rhs(double t, const Vec2& x) const { return averaged_field(law_, cost_, x, t); }

private:
  ControlLaw law_;
  CostFunction cost_;
};

/// One classical RK4 step.
template <class Rhs>
Vec2 rk4_step(const Rhs& f, double t, const Vec2& x, double h) {
  const Vec2 k1 = f(t, x);
  const Vec2 k2 = f(t + 0.5 * h, x + (0.5 * h) * k1);
  const Vec2 k3 = f(t + 0.5 * h, x + (0.5 * h) * k2);
  const Vec2 k4 = f(t + h, x + h * k3);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Uniform time grid: n steps of size h covering [t0, t_end] exactly.
struct TimeGrid {
  double t0 = 0.0;
  double h = 0.0;
  std::size_t steps = 0;

  double time(std::size_t i) const { return t0 + static_cast<double>(i) * h; }
};

/// Step (2 pi / omega) / steps_per_fast_period, rounded down so that an
/// integer number of steps lands on t_end.
TimeGrid closed_loop_grid(const SimConfig& config);

/// Streams every sample (including t0) to `observer`. Throws DivergenceError
/// with an empty partial trajectory when the state blows up.
void integrate_closed_loop(const ClosedLoopSystem& sys,
                           const std::function<void(const Sample&)>& observer);

Trajectory simulate_closed_loop(const ClosedLoopSystem& sys);

/// RK4 on the averaged system; theta and u are recorded as 0.
Trajectory simulate_averaged(const AveragedSystem& sys, const Vec2& x0, double t0, double t_end,
                             double h);

/// Inputs v_1..v_4 of the affine form and their iterated integrals over one
/// common period. first[j] = int v_j, second[k][j] = int v_j(s) int^s v_k.
struct IteratedIntegrals {
  std::array<double, 4> first{};
  std::array<std::array<double, 4>, 4> second{};
  double length = 0.0;
};

/// Iterated integrals of v_j(sigma) = d(dither_phase + sigma) h(heading_phase + sigma / k)
/// over sigma in [0, 2 pi k], by composite Simpson with an inner cumulative
/// Simpson rule. Throws NumericError if halving the resolution moves any
/// entry by more than 1e-9.
IteratedIntegrals input_iterated_integrals(int k, double dither_phase = 0.0,
                                           double heading_phase = 0.0);

/// Lie-bracket system built numerically: brackets of the four fields
/// f_1 = a(F1, 0), f_2 = a(F2, 0), f_3 = a(0, F1), f_4 = a(0, F2) by central
/// differences, weighted by (1/T) int int v_j v_i. Should agree with
/// averaged_field().
Vec2 averaged_field_numeric(const ControlLaw& law, const CostFunction& cost, const Vec2& x,
                            double t);
Vec2 averaged_field_numeric(const ControlLaw& law, const CostFunction& cost, const Vec2& x, double t,
                            const IteratedIntegrals& coefficients);

struct OnePeriodResult {
  Vec2 x_exact;      ///< high-resolution RK4 endpoint after T = 2 pi k / omega
  Vec2 x_truncated;  ///< second-order Volterra expansion with frozen coefficients
  double r_norm = 0.0;
};

/// Compares one period of the closed loop against its truncated Volterra
/// expansion around (x0, t0).
OnePeriodResult one_period_map(const ClosedLoopSystem& sys, const Vec2& x0, double t0);

}  // namespace esu
