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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "esu/control_family.hpp"
#include "esu/core.hpp"
#include "esu/dynamics.hpp"
#include "esu/parallel.hpp"

namespace esu {

/// Everything a study needs to rebuild a closed loop at another frequency.
struct StudySetup {
  ControlLaw law;
  CostFunction cost;
  SimConfig config;

  ClosedLoopSystem system() const { return {law, cost, config}; }
  /// Same setup with Omega replaced (k fixed, omega = k Omega).
  StudySetup with_Omega(double Omega) const;
  /// Same setup with k replaced (Omega fixed).
  StudySetup with_k(int k) const;
};

// ---------------------------------------------------------------------------
// Metrics

struct Metrics {
  double accumulated_sq_error = 0.0;  ///< int |x - gamma|^2 dt
  double control_effort = 0.0;        ///< int |u| dt
  double final_error = 0.0;
  double max_error_tail = 0.0;  ///< sup err over the last quarter of the window
  std::optional<double> settle_time;
  double max_abs_u = 0.0;
};

/// Trapezoid integrals on the trajectory grid. The settle time is the first
/// sample after which err stays <= 2x the mean err of the last quarter.
Metrics compute_metrics(const Trajectory& traj, const TargetPath& path);

// ---------------------------------------------------------------------------
// Parameter conditions for practical stability

struct Theorem3Report {
  double rho = 0.0;
  double lambda = 0.0;
  double kappa = 0.0;
  double nu = 0.0;
  double vartheta = 0.0;
  double delta = 0.0;
  double vartheta_min = 0.0;  ///< nu / (2 sqrt(kappa lambda))
  double delta_max = 0.0;     ///< (sqrt(rho) - sqrt(lambda)) / sqrt(kappa)
  bool vartheta_ok = false;
  bool delta_ok = false;
  bool admissible = false;
};

/// Throws ParameterError unless kappa > 0, rho > 0, nu >= 0 and 0 < lambda < rho.
Theorem3Report validate_theorem3(double kappa, double lambda, double rho, double nu,
                                 double vartheta, double delta);

/// Smallest lambda allowed for a given gain: nu^2 / (4 kappa vartheta^2).
double lambda_min_for(double kappa, double nu, double vartheta);

// ---------------------------------------------------------------------------
// Empirical studies

/// Ordinary least-squares slope of ys against xs.
double least_squares_slope(std::span<const double> xs, std::span<const double> ys);

struct DecayFit {
  double fitted_rate = 0.0;    ///< -d ln J / dt
  double expected_rate = 0.0;  ///< 4 kappa vartheta
  std::size_t points = 0;
};

/// Fits ln J(t) over samples with J > 1e-12.
DecayFit decay_rate_check(const Trajectory& avg_traj, double kappa, double vartheta);

struct OmegaPoint {
  int k = 0;
  double omega = 0.0;
  double sup_distance = 0.0;  ///< +inf when a run diverged
};

/// sup_t |x_omega(t) - xbar(t)| for each k, closed loop and averaged system
/// integrated in lockstep on the closed-loop grid from the same x0.
std::vector<OmegaPoint> omega_convergence_study(const StudySetup& setup, std::span<const int> k_list,
                                                Execution ex = Execution::Parallel);

struct VolterraPoint {
  double omega = 0.0;
  double r_norm = 0.0;
  bool excluded = false;
};

struct VolterraStudy {
  std::vector<VolterraPoint> points;
  std::optional<double> slope;  ///< empty when fewer than two usable points
  bool degenerate() const { return !slope.has_value(); }
};

/// One-period remainder |r| against omega at fixed k (Omega = omega / k),
/// slope of log |r| vs log omega. Needs >= 4 omegas spanning >= 8x.
VolterraStudy volterra_scaling_study(const StudySetup& setup, std::span<const double> omega_list,
                                     Execution ex = Execution::Parallel);

struct ProbeOptions {
  double epsilon = 0.5;
  double delta = 0.5;
  std::optional<double> lambda;  ///< default 2 lambda_min (1e-2 for a fixed target)
  std::optional<double> rho;     ///< default max(J(x0, t0), 4 lambda)
  std::optional<double> horizon; ///< default t_end - t0 of the setup
  std::vector<double> omega_grid;
  std::vector<double> t0_grid{0.0};
};

struct ProbeRun {
  double t0 = 0.0;
  double omega = 0.0;
  Vec2 x0{};
  double max_excursion = 0.0;  ///< sup_t dist(x(t), L_t)
  double last_exit = 0.0;      ///< last t - t0 with dist > epsilon (0 if never)
  bool ends_inside = false;
  bool diverged = false;
};

struct StabilityProbeReport {
  double epsilon = 0.0;
  double delta = 0.0;
  double lambda = 0.0;
  double level_radius = 0.0;
  Theorem3Report theorem3;
  bool precondition_violated = false;
  /// Smallest grid omega from which every run stays in the closed
  /// epsilon-neighbourhood of L_t for all t >= t0.
  std::optional<double> omega0;
  /// Smallest grid omega from which every run ends inside the neighbourhood,
  /// and the time after which they all stay there.
  std::optional<double> attractive_omega0;
  std::optional<double> t1;
  /// No run diverged; bound is the largest excursion observed.
  bool bounded = false;
  double excursion_bound = 0.0;
  std::vector<ProbeRun> runs;
  std::string scope_note;
};

inline constexpr int kProbeInitialStates = 8;

/// Runs 8 initial states on the circle at distance delta from L_{lambda, t0}
/// for every (t0, omega) in the grids. Claims hold only for the sampled grid.
StabilityProbeReport practical_stability_probe(const StudySetup& setup, const ProbeOptions& opt,
                                               Execution ex = Execution::Parallel);

/// max over states of |averaged_field_numeric - averaged_field|.
double oracle_equivalence_residual(const ControlLaw& law, const CostFunction& cost,
                                   std::span<const Vec2> states, double t,
                                   Execution ex = Execution::Parallel);

}  // namespace esu
