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

#include "esu/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace esu {

StudySetup StudySetup::with_Omega(double Omega) const {
  SimConfig cfg = config;
  cfg.Omega = Omega;
  return {law.with_Omega(Omega), cost, cfg};
}

StudySetup StudySetup::with_k(int k) const {
  SimConfig cfg = config;
  cfg.k = k;
  return {law.with_k(k), cost, cfg};
}

namespace {

// int |q| over [0, d2] for the quadratic through (0, a), (d1, b), (d2, c).
double abs_quadratic_integral(double d1, double d2, double a, double b, double c) {
  const double r = ((c - a) / d2 - (b - a) / d1) / (d2 - d1);
  const double p = (b - a) / d1 - r * d1;
  auto Q = [&](double x) { return x * (a + x * (p / 2.0 + x * r / 3.0)); };
  std::array<double, 4> cuts{0.0, d2, d2, d2};
  std::size_t n = 1;
  auto add_root = [&](double x) {
    if (x > 0.0 && x < d2) cuts[n++] = x;
  };
  if (r == 0.0) {
    if (p != 0.0) add_root(-a / p);
  } else {
    const double disc = p * p - 4.0 * r * a;
    if (disc > 0.0) {
      const double q = -0.5 * (p + std::copysign(std::sqrt(disc), p));
      if (q != 0.0) add_root(a / q);
      add_root(q / r);
    }
  }
  std::sort(cuts.begin() + 1, cuts.begin() + n);
  cuts[n] = d2;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += std::abs(Q(cuts[i + 1]) - Q(cuts[i]));
  return total;
}

// int |f| dt over the samples: piecewise-quadratic (Simpson) on pairs of
// steps, split at sign changes, with a final linear piece for odd counts.
template <class F>
double integrate_abs(const std::vector<Sample>& s, F f) {
  double total = 0.0;
  std::size_t i = 0;
  for (; i + 2 < s.size(); i += 2)
    total += abs_quadratic_integral(s[i + 1].t - s[i].t, s[i + 2].t - s[i].t, f(i), f(i + 1),
                                    f(i + 2));
  if (i + 1 < s.size()) {
    const double a = f(i), b = f(i + 1), h = s[i + 1].t - s[i].t;
    if ((a < 0.0) != (b < 0.0) && a != b)
      total += 0.5 * h * (a * a + b * b) / std::abs(b - a);
    else
      total += 0.5 * h * std::abs(a + b);
  }
  return total;
}

}  // namespace

Metrics compute_metrics(const Trajectory& traj, const TargetPath& path) {
  if (traj.empty()) throw ParameterError("compute_metrics: empty trajectory");
  const auto& s = traj.samples;
  std::vector<double> err(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) err[i] = norm(s[i].x - path.eval(s[i].t));

  Metrics m;
  m.accumulated_sq_error =
      integrate_abs(s, [&err](std::size_t i) { return err[i] * err[i]; });
  m.control_effort = integrate_abs(s, [&s](std::size_t i) { return s[i].u; });
  for (const auto& sample : s) m.max_abs_u = std::max(m.max_abs_u, std::abs(sample.u));
  m.final_error = err.back();

  const double tail_start = s.front().t + 0.75 * (s.back().t - s.front().t);
  double tail_sum = 0.0;
  std::size_t tail_n = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i].t < tail_start) continue;
    m.max_error_tail = std::max(m.max_error_tail, err[i]);
    tail_sum += err[i];
    ++tail_n;
  }
  const double threshold = 2.0 * tail_sum / static_cast<double>(tail_n);
  std::size_t first_ok = s.size();
  for (std::size_t i = s.size(); i-- > 0;) {
    if (err[i] > threshold) break;
    first_ok = i;
  }
  if (first_ok < s.size()) m.settle_time = s[first_ok].t;
  return m;
}

Theorem3Report validate_theorem3(double kappa, double lambda, double rho, double nu,
                                 double vartheta, double delta) {
  if (!(kappa > 0.0)) throw ParameterError("theorem3: kappa must be > 0");
  if (!(rho > 0.0)) throw ParameterError("theorem3: rho must be > 0");
  if (!(nu >= 0.0)) throw ParameterError("theorem3: nu must be >= 0");
  if (!(lambda > 0.0)) throw ParameterError("theorem3: lambda must be > 0");
  if (!(lambda < rho)) throw ParameterError("theorem3: lambda must be < rho");

  Theorem3Report r;
  r.rho = rho;
  r.lambda = lambda;
  r.kappa = kappa;
  r.nu = nu;
  r.vartheta = vartheta;
  r.delta = delta;
  r.vartheta_min = nu / (2.0 * std::sqrt(kappa * lambda));
  r.delta_max = (std::sqrt(rho) - std::sqrt(lambda)) / std::sqrt(kappa);
  r.vartheta_ok = vartheta > r.vartheta_min;
  r.delta_ok = delta > 0.0 && delta < r.delta_max;
  r.admissible = r.vartheta_ok && r.delta_ok;
  return r;
}

double lambda_min_for(double kappa, double nu, double vartheta) {
  return nu * nu / (4.0 * kappa * vartheta * vartheta);
}

double least_squares_slope(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw ParameterError("least_squares_slope: need >= 2 paired points");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (sxx == 0.0) throw NumericError("least_squares_slope: abscissae are all equal");
  return sxy / sxx;
}

DecayFit decay_rate_check(const Trajectory& avg_traj, double kappa, double vartheta) {
  std::vector<double> ts, logs;
  for (const auto& s : avg_traj.samples) {
    if (!(s.J > 1e-12)) continue;
    ts.push_back(s.t);
    logs.push_back(std::log(s.J));
  }
  if (ts.size() < 2) throw NumericError("decay_rate_check: fewer than two samples with J > 1e-12");
  DecayFit fit;
  fit.fitted_rate = -least_squares_slope(ts, logs);
  if (fit.fitted_rate == 0.0) fit.fitted_rate = 0.0;  // no -0 in reports
  fit.expected_rate = 4.0 * kappa * vartheta;
  fit.points = ts.size();
  return fit;
}

std::vector<OmegaPoint> omega_convergence_study(const StudySetup& setup, std::span<const int> k_list,
                                                Execution ex) {
  for (int k : k_list)
    if (k < 2) throw ParameterError("omega study: every k must be >= 2");
  std::vector<OmegaPoint> out(k_list.size());
  for_each_index(ex, k_list.size(), [&](std::size_t idx) {
    const StudySetup s = setup.with_k(k_list[idx]);
    const ClosedLoopSystem sys = s.system();
    const AveragedSystem avg(s.law, s.cost);
    const TimeGrid grid = closed_loop_grid(s.config);
    auto avg_rhs = [&avg](double t, const Vec2& x) { return avg.rhs(t, x); };

    OmegaPoint p{s.config.k, s.config.omega(), 0.0};
    Vec2 xbar = s.config.x0;
    try {
      integrate_closed_loop(sys, [&](const Sample& sample) {
        p.sup_distance = std::max(p.sup_distance, norm(sample.x - xbar));
        xbar = rk4_step(avg_rhs, sample.t, xbar, grid.h);
      });
    } catch (const DivergenceError&) {
      p.sup_distance = std::numeric_limits<double>::infinity();
    }
    out[idx] = p;
  });
  return out;
}

VolterraStudy volterra_scaling_study(const StudySetup& setup, std::span<const double> omega_list,
                                     Execution ex) {
  if (omega_list.size() < 4) throw ParameterError("volterra study: need at least 4 omegas");
  const auto [lo, hi] = std::minmax_element(omega_list.begin(), omega_list.end());
  if (!(*lo > 0.0) || *hi < 8.0 * *lo)
    throw ParameterError("volterra study: omegas must be positive and span at least 8x");

  VolterraStudy study;
  study.points.resize(omega_list.size());
  const int k = setup.config.k;
  for_each_index(ex, omega_list.size(), [&](std::size_t i) {
    const double omega = omega_list[i];
    const StudySetup s = setup.with_Omega(omega / k);
    const OnePeriodResult r = one_period_map(s.system(), s.config.x0, s.config.t0);
    study.points[i] = {omega, r.r_norm, r.r_norm == 0.0};
  });

  std::vector<double> xs, ys;
  for (const auto& p : study.points) {
    if (p.excluded) continue;
    xs.push_back(std::log(p.omega));
    ys.push_back(std::log(p.r_norm));
  }
  if (xs.size() >= 2) study.slope = least_squares_slope(xs, ys);
  return study;
}

StabilityProbeReport practical_stability_probe(const StudySetup& setup, const ProbeOptions& opt,
                                               Execution ex) {
  if (opt.omega_grid.empty() || opt.t0_grid.empty())
    throw ParameterError("probe: omega and t0 grids must be non-empty");
  if (!(opt.epsilon > 0.0) || !(opt.delta > 0.0))
    throw ParameterError("probe: epsilon and delta must be > 0");

  const auto& cost = setup.cost;
  const double kappa = cost.kappa();
  const double horizon = opt.horizon.value_or(setup.config.t_end - setup.config.t0);
  if (!(horizon > 0.0)) throw ParameterError("probe: horizon must be > 0");
  const auto [t0_lo, t0_hi] = std::minmax_element(opt.t0_grid.begin(), opt.t0_grid.end());
  const double nu = target_speed_bound(cost.path(), *t0_lo, *t0_hi + horizon);
  const double gain = setup.law.effective_gain();

  StabilityProbeReport rep;
  rep.epsilon = opt.epsilon;
  rep.delta = opt.delta;
  rep.lambda = opt.lambda.value_or(nu > 0.0 ? 2.0 * lambda_min_for(kappa, nu, gain) : 1e-2);
  const double J0 = cost.eval(setup.config.x0, setup.config.t0);
  const double rho = opt.rho.value_or(std::max(J0, 4.0 * rep.lambda));
  rep.theorem3 = validate_theorem3(kappa, rep.lambda, rho, nu, gain, opt.delta);
  rep.precondition_violated = !rep.theorem3.admissible;
  const LevelSetFamily level(cost, rep.lambda);
  rep.level_radius = level.radius();
  rep.scope_note = "verdicts cover the sampled (t0, omega, x0) grid only";

  std::vector<double> omegas = opt.omega_grid;
  std::sort(omegas.begin(), omegas.end());
  omegas.erase(std::unique(omegas.begin(), omegas.end()), omegas.end());

  const std::size_t per_omega = opt.t0_grid.size() * kProbeInitialStates;
  rep.runs.resize(omegas.size() * per_omega);
  const int k = setup.config.k;
  for_each_index(ex, rep.runs.size(), [&](std::size_t idx) {
    const std::size_t w = idx / per_omega;
    const std::size_t t0i = (idx % per_omega) / kProbeInitialStates;
    const int state = static_cast<int>(idx % kProbeInitialStates);

    ProbeRun run;
    run.omega = omegas[w];
    run.t0 = opt.t0_grid[t0i];
    const double angle = 2.0 * kPi * state / kProbeInitialStates;
    const double radius = rep.level_radius + opt.delta;
    run.x0 = cost.path().eval(run.t0) + radius * Vec2{std::cos(angle), std::sin(angle)};

    StudySetup s = setup.with_Omega(run.omega / k);
    s.config.x0 = run.x0;
    s.config.t0 = run.t0;
    s.config.t_end = run.t0 + horizon;
    s.config.theta0 = setup.config.theta0;
    double last_dist = 0.0;
    try {
      integrate_closed_loop(s.system(), [&](const Sample& sample) {
        const double d = std::max(0.0, sample.err - rep.level_radius);
        run.max_excursion = std::max(run.max_excursion, d);
        if (d > opt.epsilon) run.last_exit = sample.t - run.t0;
        last_dist = d;
      });
      run.ends_inside = last_dist <= opt.epsilon;
    } catch (const DivergenceError&) {
      run.diverged = true;
      run.max_excursion = std::numeric_limits<double>::infinity();
      run.last_exit = horizon;
    }
    rep.runs[idx] = run;
  });

  auto runs_at = [&](std::size_t w) {
    return std::span<const ProbeRun>(rep.runs).subspan(w * per_omega, per_omega);
  };
  // Scan from the largest omega down: a clause holds "from omega0 on" only if
  // it holds at every larger grid frequency too.
  for (std::size_t w = omegas.size(); w-- > 0;) {
    const auto rs = runs_at(w);
    const bool ok = std::all_of(rs.begin(), rs.end(),
                                [&](const ProbeRun& r) { return r.max_excursion <= opt.epsilon; });
    if (!ok) break;
    rep.omega0 = omegas[w];
  }
  for (std::size_t w = omegas.size(); w-- > 0;) {
    const auto rs = runs_at(w);
    if (!std::all_of(rs.begin(), rs.end(), [](const ProbeRun& r) { return r.ends_inside; })) break;
    rep.attractive_omega0 = omegas[w];
    double t1 = rep.t1.value_or(0.0);
    for (const auto& r : rs) t1 = std::max(t1, r.last_exit);
    rep.t1 = t1;
  }
  rep.bounded = std::none_of(rep.runs.begin(), rep.runs.end(),
                             [](const ProbeRun& r) { return r.diverged; });
  for (const auto& r : rep.runs) rep.excursion_bound = std::max(rep.excursion_bound, r.max_excursion);
  return rep;
}

double oracle_equivalence_residual(const ControlLaw& law, const CostFunction& cost,
                                   std::span<const Vec2> states, double t, Execution ex) {
  const IteratedIntegrals coeffs = input_iterated_integrals(law.k());
  std::vector<double> res(states.size());
  for_each_index(ex, states.size(), [&](std::size_t i) {
    res[i] = norm(averaged_field_numeric(law, cost, states[i], t, coeffs) -
                  averaged_field(law, cost, states[i], t));
  });
  return res.empty() ? 0.0 : *std::max_element(res.begin(), res.end());
}

}  // namespace esu
