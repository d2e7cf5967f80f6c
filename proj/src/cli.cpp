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

#include "esu/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "esu/analysis.hpp"
#include "esu/io.hpp"
#include "esu/scenario.hpp"

namespace esu::cli {
namespace {

namespace fs = std::filesystem;

struct CliError {
  int code;
  std::string kind;
  std::string reason;
};

[[noreturn]] void fail(int code, std::string kind, std::string reason) {
  throw CliError{code, std::move(kind), std::move(reason)};
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), '"', '\'');
  return s;
}

struct Common {
  std::vector<std::string> overrides;
  std::string out_dir;
  std::string config;
  bool serial = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--override", c.overrides, "key=value scenario override (repeatable)");
  cmd->add_option("--out", c.out_dir, "output directory (default $ES_UNICYCLE_OUT or ./es_unicycle_out)");
  cmd->add_option("--config", c.config, "scenario config file with [name] sections");
  cmd->add_flag("--serial", c.serial, "run sweeps on one thread");
}

fs::path output_dir(const Common& c) {
  if (!c.out_dir.empty()) return c.out_dir;
  if (const char* env = std::getenv("ES_UNICYCLE_OUT"); env != nullptr && *env != '\0') return env;
  return "es_unicycle_out";
}

Scenario resolve_scenario(const std::string& name, const Common& c) {
  std::optional<Scenario> sc;
  if (!c.config.empty()) {
    for (auto& s : load_scenario_config(c.config))
      if (s.name == name) sc = std::move(s);
  }
  if (!sc) sc = find_scenario(name);
  if (!sc) fail(kUsage, "usage", "unknown scenario '" + name + "'");
  for (const auto& o : c.overrides) apply_override(*sc, o);
  sc->config.validate();
  return *sc;
}

Execution execution(const Common& c) { return c.serial ? Execution::Serial : Execution::Parallel; }

std::string law_name(LawKind k) { return std::string(to_string(k)); }

void add_metrics(Summary& s, const Metrics& m) {
  s["accumulated_sq_error"] = format_double(m.accumulated_sq_error);
  s["control_effort"] = format_double(m.control_effort);
  s["final_error"] = format_double(m.final_error);
  s["max_error_tail"] = format_double(m.max_error_tail);
  s["settle_time"] = m.settle_time ? format_double(*m.settle_time) : "none";
  s["max_abs_u"] = format_double(m.max_abs_u);
}

void add_setup(Summary& s, const Scenario& sc, const StudySetup& st) {
  s["scenario"] = sc.name;
  s["law"] = law_name(st.law.kind());
  s["k"] = std::to_string(st.config.k);
  s["Omega"] = format_double(st.config.Omega);
  s["omega"] = format_double(st.config.omega());
  s["alpha"] = format_double(st.law.alpha());
  s["vartheta"] = format_double(st.law.vartheta());
  s["amplitude_scale"] = format_double(st.law.amplitude_scale());
  s["dither_amplitude"] = format_double(st.law.gain());
  s["kappa"] = format_double(st.cost.kappa());
  s["x0"] = format_double(st.config.x0.x1) + "," + format_double(st.config.x0.x2);
  s["t0"] = format_double(st.config.t0);
  s["t_end"] = format_double(st.config.t_end);
  s["steps_per_fast_period"] = std::to_string(st.config.steps_per_fast_period);
  s["nu"] = format_double(target_speed_bound(st.cost.path(), st.config.t0, st.config.t_end));
}

void write_run_artifacts(const fs::path& dir, const Trajectory& traj, const Summary& summary) {
  const std::size_t stride = csv_stride(traj.size());
  write_file_atomic(dir / "trajectory.csv", trajectory_csv(traj, stride));

  std::string pos = "t,x1,x2,gamma1,gamma2\n", ctl = "t,u\n", err = "t,err\n";
  const auto n = traj.samples.size();
  auto emit = [&](const Sample& s) {
    pos += format_double(s.t) + ',' + format_double(s.x.x1) + ',' + format_double(s.x.x2) + ',' +
           format_double(s.gamma.x1) + ',' + format_double(s.gamma.x2) + '\n';
    ctl += format_double(s.t) + ',' + format_double(s.u) + '\n';
    err += format_double(s.t) + ',' + format_double(s.err) + '\n';
  };
  for (std::size_t i = 0; i < n; i += stride) emit(traj.samples[i]);
  if (n > 0 && (n - 1) % stride != 0) emit(traj.samples.back());
  write_file_atomic(dir / "plot_trajectory.csv", pos);
  write_file_atomic(dir / "plot_control.csv", ctl);
  write_file_atomic(dir / "plot_error.csv", err);
  write_file_atomic(dir / "summary.txt", format_summary(summary));
}

struct LawRun {
  LawKind law{};
  bool ok = false;
  std::string failure;
  Trajectory traj;
  Metrics metrics;
  Summary summary;
};

LawRun simulate_law(const Scenario& sc, LawKind kind) {
  LawRun r;
  r.law = kind;
  StudySetup st = sc.setup(kind);
  add_setup(r.summary, sc, st);
  try {
    r.traj = simulate_closed_loop(st.system());
    r.ok = true;
  } catch (const DivergenceError& e) {
    r.traj = e.partial();
    r.failure = e.what();
  }
  r.summary["status"] = r.ok ? "ok" : "diverged";
  if (!r.traj.empty()) {
    r.metrics = compute_metrics(r.traj, st.cost.path());
    add_metrics(r.summary, r.metrics);
  }
  r.summary["samples"] = std::to_string(r.traj.size());
  return r;
}

int cmd_run(const std::string& scenario, const std::string& law, const Common& c, std::ostream& out) {
  const Scenario sc = resolve_scenario(scenario, c);
  const LawKind kind = law.empty() ? sc.default_law : parse_law_kind(law);
  LawRun r = simulate_law(sc, kind);
  const fs::path dir = output_dir(c) / (sc.name + "-" + law_name(kind));
  write_run_artifacts(dir, r.traj, r.summary);
  out << format_summary(r.summary);
  out << "artifacts = " << dir.string() << "\n";
  if (!r.ok) fail(kDiverged, "divergence", r.failure);
  return kOk;
}

int cmd_compare(const std::string& scenario, const std::vector<std::string>& laws, const Common& c,
                std::ostream& out) {
  if (laws.size() < 2) fail(kUsage, "usage", "compare needs at least two laws");
  const Scenario sc = resolve_scenario(scenario, c);
  std::vector<LawKind> kinds;
  for (const auto& l : laws) kinds.push_back(parse_law_kind(l));
  for (LawKind k : kinds) sc.setup(k);  // surface parameter errors before running

  std::vector<LawRun> runs(kinds.size());
  for_each_index(execution(c), kinds.size(), [&](std::size_t i) {
    try {
      runs[i] = simulate_law(sc, kinds[i]);
    } catch (const Error& e) {
      runs[i].law = kinds[i];
      runs[i].failure = e.what();
    }
  });
  std::stable_sort(runs.begin(), runs.end(), [](const LawRun& a, const LawRun& b) {
    if (a.ok != b.ok) return a.ok;
    return a.ok && a.metrics.accumulated_sq_error < b.metrics.accumulated_sq_error;
  });

  std::string csv = "law,status,accumulated_sq_error,control_effort,final_error,max_error_tail\n";
  out << std::left << std::setw(8) << "law" << std::setw(10) << "status" << std::setw(24)
      << "accumulated_sq_error" << std::setw(24) << "control_effort" << std::setw(24)
      << "final_error" << "max_error_tail\n";
  bool any_failed = false;
  for (const auto& r : runs) {
    const std::string status = r.ok ? "ok" : "failed";
    any_failed |= !r.ok;
    auto val = [&r](double v) { return r.ok ? format_double(v) : std::string("nan"); };
    csv += law_name(r.law) + "," + status + "," + val(r.metrics.accumulated_sq_error) + "," +
           val(r.metrics.control_effort) + "," + val(r.metrics.final_error) + "," +
           val(r.metrics.max_error_tail) + "\n";
    out << std::left << std::setw(8) << law_name(r.law) << std::setw(10) << status << std::setw(24)
        << val(r.metrics.accumulated_sq_error) << std::setw(24) << val(r.metrics.control_effort)
        << std::setw(24) << val(r.metrics.final_error) << val(r.metrics.max_error_tail) << "\n";
  }
  const fs::path path = output_dir(c) / ("compare-" + sc.name + ".csv");
  write_file_atomic(path, csv);
  out << "artifacts = " << path.string() << "\n";
  if (any_failed) fail(kCompareFailed, "compare", "at least one law failed; see table");
  return kOk;
}

struct StudyArgs {
  std::string kind;
  std::string scenario;
  std::string law;
  std::vector<int> k_list{10, 20, 40, 80};
  std::vector<double> omega_list;
  std::vector<double> t0_list{0.0};
  double eps = 0.5;
  double delta = 0.5;
  std::optional<double> lambda, rho, horizon;
};

int cmd_study(const StudyArgs& a, const Common& c, std::ostream& out) {
  std::string scenario = a.scenario;
  if (scenario.empty()) scenario = a.kind == "volterra" ? "fixed-origin" : "sim-moving";
  const Scenario sc = resolve_scenario(scenario, c);
  const LawKind kind = a.law.empty() ? sc.default_law : parse_law_kind(a.law);
  const StudySetup setup = sc.setup(kind);
  const Execution ex = execution(c);

  Summary s;
  s["study"] = a.kind;
  s["scenario"] = sc.name;
  s["law"] = law_name(kind);
  bool degenerate = false;
  std::string points = "";

  if (a.kind == "omega") {
    const auto pts = omega_convergence_study(setup, a.k_list, ex);
    points = "k,omega,sup_distance\n";
    bool monotone = true;
    std::size_t finite = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      points += std::to_string(pts[i].k) + "," + format_double(pts[i].omega) + "," +
                format_double(pts[i].sup_distance) + "\n";
      s["sup_distance.k" + std::to_string(pts[i].k)] = format_double(pts[i].sup_distance);
      if (i > 0 && pts[i].sup_distance > pts[i - 1].sup_distance) monotone = false;
      finite += std::isfinite(pts[i].sup_distance) ? 1 : 0;
    }
    s["non_increasing"] = monotone ? "true" : "false";
    degenerate = finite == 0;
  } else if (a.kind == "volterra") {
    std::vector<double> omegas = a.omega_list;
    if (omegas.empty()) omegas = {50, 100, 200, 400, 800};
    const auto study = volterra_scaling_study(setup, omegas, ex);
    points = "omega,r_norm,excluded\n";
    for (const auto& p : study.points)
      points += format_double(p.omega) + "," + format_double(p.r_norm) + "," +
                (p.excluded ? "true" : "false") + "\n";
    s["slope"] = study.slope ? format_double(*study.slope) : "none";
    degenerate = study.degenerate();
  } else if (a.kind == "probe") {
    ProbeOptions opt;
    opt.epsilon = a.eps;
    opt.delta = a.delta;
    opt.omega_grid = a.omega_list.empty() ? std::vector<double>{50, 100, 200} : a.omega_list;
    opt.t0_grid = a.t0_list;
    opt.lambda = a.lambda;
    opt.rho = a.rho;
    opt.horizon = a.horizon;
    const auto rep = practical_stability_probe(setup, opt, ex);
    s["epsilon"] = format_double(rep.epsilon);
    s["delta"] = format_double(rep.delta);
    s["lambda"] = format_double(rep.lambda);
    s["rho"] = format_double(rep.theorem3.rho);
    s["nu"] = format_double(rep.theorem3.nu);
    s["level_radius"] = format_double(rep.level_radius);
    s["vartheta_effective"] = format_double(rep.theorem3.vartheta);
    s["vartheta_min"] = format_double(rep.theorem3.vartheta_min);
    s["delta_max"] = format_double(rep.theorem3.delta_max);
    s["precondition_violated"] = rep.precondition_violated ? "true" : "false";
    s["omega0"] = rep.omega0 ? format_double(*rep.omega0) : "none";
    s["attractive_omega0"] = rep.attractive_omega0 ? format_double(*rep.attractive_omega0) : "none";
    s["t1"] = rep.t1 ? format_double(*rep.t1) : "none";
    s["bounded"] = rep.bounded ? "true" : "false";
    s["excursion_bound"] = format_double(rep.excursion_bound);
    s["scope"] = rep.scope_note;
    points = "t0,omega,x0_1,x0_2,max_excursion,last_exit,ends_inside,diverged\n";
    for (const auto& r : rep.runs)
      points += format_double(r.t0) + "," + format_double(r.omega) + "," + format_double(r.x0.x1) +
                "," + format_double(r.x0.x2) + "," + format_double(r.max_excursion) + "," +
                format_double(r.last_exit) + "," + (r.ends_inside ? "true" : "false") + "," +
                (r.diverged ? "true" : "false") + "\n";
  } else {
    fail(kUsage, "usage", "unknown study kind '" + a.kind + "' (omega|volterra|probe)");
  }

  const fs::path dir = output_dir(c);
  const std::string stem = "study-" + a.kind + "-" + sc.name;
  write_file_atomic(dir / (stem + ".txt"), format_summary(s));
  write_file_atomic(dir / (stem + ".csv"), points);
  out << format_summary(s);
  out << "artifacts = " << (dir / (stem + ".txt")).string() << "\n";
  if (degenerate) fail(kDegenerate, "degenerate", "study has no usable points");
  return kOk;
}

int cmd_list(std::ostream& out) {
  for (const auto& s : scenario_catalog())
    out << std::left << std::setw(14) << s.name << " law=" << law_name(s.default_law) << "  "
        << s.description << "\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Extremum seeking for a unicycle with a moving target", "es-unicycle"};
  app.require_subcommand(1);

  Common common;
  std::string scenario, law;
  std::vector<std::string> laws;
  StudyArgs study;

  auto* run_cmd = app.add_subcommand("run", "simulate one scenario");
  run_cmd->add_option("scenario", scenario, "scenario name")->required();
  run_cmd->add_option("--law", law, "cont1|cont2|cont3|cont4|custom");
  add_common(run_cmd, common);

  auto* cmp_cmd = app.add_subcommand("compare", "compare laws on one scenario");
  cmp_cmd->add_option("scenario", scenario, "scenario name")->required();
  cmp_cmd->add_option("laws", laws, "two or more laws");
  add_common(cmp_cmd, common);

  auto* study_cmd = app.add_subcommand("study", "omega-convergence, Volterra scaling or probe");
  study_cmd->add_option("kind", study.kind, "omega|volterra|probe")->required();
  study_cmd->add_option("scenario", study.scenario, "scenario name");
  study_cmd->add_option("--law", study.law, "law to study");
  study_cmd->add_option("--k", study.k_list, "k values (omega study)")->delimiter(',');
  study_cmd->add_option("--omega", study.omega_list, "omega values")->delimiter(',');
  study_cmd->add_option("--t0", study.t0_list, "initial times (probe)")->delimiter(',');
  study_cmd->add_option("--eps", study.eps, "epsilon (probe)");
  study_cmd->add_option("--delta", study.delta, "delta (probe)");
  study_cmd->add_option("--lambda", study.lambda, "level-set value (probe)");
  study_cmd->add_option("--rho", study.rho, "admissible region J <= rho (probe)");
  study_cmd->add_option("--horizon", study.horizon, "run length per probe simulation");
  add_common(study_cmd, common);

  auto* list_cmd = app.add_subcommand("list", "list built-in scenarios");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "es-unicycle: error kind=usage reason=\"" << one_line(e.what()) << "\"\n";
    return kUsage;
  }

  try {
    if (*list_cmd) return cmd_list(out);
    if (*run_cmd) return cmd_run(scenario, law, common, out);
    if (*cmp_cmd) return cmd_compare(scenario, laws, common, out);
    if (*study_cmd) return cmd_study(study, common, out);
  } catch (const CliError& e) {
    err << "es-unicycle: error kind=" << e.kind << " reason=\"" << one_line(e.reason) << "\"\n";
    return e.code;
  } catch (const ParameterError& e) {
    err << "es-unicycle: error kind=usage reason=\"" << one_line(e.what()) << "\"\n";
    return kUsage;
  } catch (const DivergenceError& e) {
    err << "es-unicycle: error kind=divergence reason=\"" << one_line(e.what()) << "\"\n";
    return kDiverged;
  } catch (const std::exception& e) {
    err << "es-unicycle: error kind=failure reason=\"" << one_line(e.what()) << "\"\n";
    return kFailure;
  }
  return kUsage;
}

}  // namespace esu::cli
