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

#include "esu/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "esu/io.hpp"

namespace esu {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

int parse_int(std::string_view text) {
  const double v = parse_double(text);
  if (v != std::floor(v) || std::abs(v) > 1e9)
    throw ParameterError("expected an integer, got '" + std::string(text) + "'");
  return static_cast<int>(v);
}

Vec2 parse_vec2(std::string_view text) {
  const auto comma = text.find(',');
  if (comma == std::string_view::npos)
    throw ParameterError("expected 'a,b', got '" + std::string(text) + "'");
  return {parse_double(trim(text.substr(0, comma))), parse_double(trim(text.substr(comma + 1)))};
}

TargetPath load_tabulated(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ParameterError("cannot open tabulated target '" + file + "'");
  std::vector<std::pair<double, Vec2>> samples;
  std::string line;
  while (std::getline(in, line)) {
    const auto l = trim(line);
    if (l.empty() || l.front() == '#' || std::isalpha(static_cast<unsigned char>(l.front()))) continue;
    const auto c1 = l.find(',');
    if (c1 == std::string_view::npos) throw ParameterError("tabulated target: expected t,x1,x2");
    samples.emplace_back(parse_double(trim(l.substr(0, c1))), parse_vec2(l.substr(c1 + 1)));
  }
  return TargetPath::tabulated(std::move(samples));
}

TargetPath parse_target(std::string_view text) {
  if (text == "linesine" || text == "line-sine") return TargetPath::line_sine();
  if (text == "figure8" || text == "figure-eight") return TargetPath::figure_eight();
  if (text.starts_with("constant:")) return TargetPath::constant(parse_vec2(text.substr(9)));
  if (text.starts_with("tabulated:")) return load_tabulated(std::string(text.substr(10)));
  throw ParameterError("unknown target '" + std::string(text) + "'");
}

Scenario base_scenario(std::string name, std::string description, double Omega, int k, Vec2 x0,
                       double t_end, TargetPath path, double kappa, LawKind law) {
  Scenario s;
  s.name = std::move(name);
  s.description = std::move(description);
  s.config.x0 = x0;
  s.config.t0 = 0.0;
  s.config.t_end = t_end;
  s.config.Omega = Omega;
  s.config.k = k;
  s.config.steps_per_fast_period = 200;
  s.path = std::move(path);
  s.kappa = kappa;
  s.vartheta = 1.0;
  s.default_law = law;
  return s;
}

std::vector<Scenario> build_catalog() {
  std::vector<Scenario> c;
  c.push_back(base_scenario("sim-moving",
                            "moving target (0.1t, sin 0.1t), Omega=5, omega=50, x0=(-1,1), "
                            "vartheta=1, kappa=1, 100 s",
                            5.0, 10, {-1.0, 1.0}, 100.0, TargetPath::line_sine(), 1.0,
                            LawKind::Cont1));

  Scenario fixed = base_scenario("exp-fixed",
                                 "fixed target (0.5,0.7), Omega=1.5, omega=3, tuned for |u| <= 0.4, "
                                 "x0=(0,0), 200 s",
                                 1.5, 2, {0.0, 0.0}, 200.0, TargetPath::constant({0.5, 0.7}), 4.0,
                                 LawKind::Cont4);
  fixed.tuned = {{LawKind::Cont1, {2.25e-4, 10.0}},
                 {LawKind::Cont2, {4.84e-2, 4.0}},
                 {LawKind::Cont4, {3.249e-1, 4.0}}};
  c.push_back(std::move(fixed));

  Scenario eight = base_scenario("exp-eight",
                                 "figure-eight target, Omega=1, omega=3, tuned for |u| <= 0.4, "
                                 "x0=(0.5,0.5), 500 s",
                                 1.0, 3, {0.5, 0.5}, 500.0, TargetPath::figure_eight(), 1.0,
                                 LawKind::Cont4);
  eight.tuned = {{LawKind::Cont2, {5.29e-2, 4.0}}, {LawKind::Cont4, {2.5e-1, 1.0}}};
  c.push_back(std::move(eight));

  c.push_back(base_scenario("fixed-origin",
                            "fixed target at the origin, x0=(1,0), Omega=5, k=10, kappa=1, 10 s",
                            5.0, 10, {1.0, 0.0}, 10.0, TargetPath::constant({0.0, 0.0}), 1.0,
                            LawKind::Cont2));
  return c;
}

}  // namespace

StudySetup Scenario::setup(LawKind kind) const {
  const auto tuned_it = tuned.find(kind);
  const bool has_tuned = tuned_it != tuned.end();

  const double kap = kappa_override.value_or(has_tuned ? tuned_it->second.kappa : kappa);
  const double scale =
      amplitude_scale.value_or(kind == LawKind::Cont2 ? 1.0 / std::sqrt(2.0) : 1.0);
  double vt = vartheta;
  if (vartheta_override)
    vt = *vartheta_override;
  else if (has_tuned)
    vt = tuned_it->second.alpha_product / (scale * scale * alpha_for(config.k));

  CostFunction cost(kap, path);
  if (kind == LawKind::Custom)
    return {make_custom_law(custom_f1, z_ref, c0, vt, config.k, config.Omega, scale), cost, config};
  return {ControlLaw(kind, builtin_pair(kind), vt, config.k, config.Omega, scale), cost, config};
}

const std::vector<Scenario>& scenario_catalog() {
  static const std::vector<Scenario> catalog = build_catalog();
  return catalog;
}

std::optional<Scenario> find_scenario(std::string_view name) {
  for (const auto& s : scenario_catalog())
    if (s.name == name) return s;
  return std::nullopt;
}

void apply_override(Scenario& sc, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  auto& cfg = sc.config;
  if (key == "t0") cfg.t0 = parse_double(value);
  else if (key == "t_end") cfg.t_end = parse_double(value);
  else if (key == "Omega") cfg.Omega = parse_double(value);
  else if (key == "k") cfg.k = parse_int(value);
  else if (key == "omega") {
    const double ratio = parse_double(value) / cfg.Omega;
    const double k = std::round(ratio);
    if (std::abs(ratio - k) > 1e-9 * std::max(1.0, ratio) || k < 2.0)
      throw ParameterError("omega / Omega must be an integer >= 2 (got " + format_double(ratio) + ")");
    cfg.k = static_cast<int>(k);
  } else if (key == "theta0") cfg.theta0 = parse_double(value);
  else if (key == "steps_per_fast_period") cfg.steps_per_fast_period = parse_int(value);
  else if (key == "x0") cfg.x0 = parse_vec2(value);
  else if (key == "vartheta") sc.vartheta_override = parse_double(value);
  else if (key == "kappa") sc.kappa_override = parse_double(value);
  else if (key == "amplitude_scale") sc.amplitude_scale = parse_double(value);
  else if (key == "law") sc.default_law = parse_law_kind(value);
  else if (key == "target") sc.path = parse_target(value);
  else if (key == "f1") {
    catalog_f1(value);  // validates the name
    sc.custom_f1 = std::string(value);
  } else if (key == "z_ref") sc.z_ref = parse_double(value);
  else if (key == "c0") sc.c0 = parse_double(value);
  else if (key == "description") sc.description = std::string(value);
  else throw ParameterError("unknown key '" + std::string(key) + "'");
}

void apply_override(Scenario& sc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw ParameterError("override must be key=value, got '" + std::string(assignment) + "'");
  apply_override(sc, assignment.substr(0, eq), assignment.substr(eq + 1));
}

std::vector<Scenario> parse_scenario_config(std::string_view text) {
  struct Section {
    std::string name;
    std::vector<std::pair<std::string, std::string>> entries;
    int line = 0;
  };
  std::vector<Section> sections;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto line = trim(raw);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = trim(line.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3)
        throw ParameterError("config line " + std::to_string(line_no) + ": malformed section header");
      sections.push_back({std::string(trim(line.substr(1, line.size() - 2))), {}, line_no});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos || sections.empty())
      throw ParameterError("config line " + std::to_string(line_no) +
                           ": expected 'key = value' inside a [section]");
    sections.back().entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }

  std::vector<Scenario> out;
  for (const auto& sec : sections) {
    std::string base = "sim-moving";
    for (const auto& [k, v] : sec.entries)
      if (k == "base") base = v;
    auto sc = find_scenario(base);
    if (!sc) throw ParameterError("config section [" + sec.name + "]: unknown base '" + base + "'");
    sc->name = sec.name;
    for (const auto& [k, v] : sec.entries) {
      if (k == "base") continue;
      try {
        apply_override(*sc, k, v);
      } catch (const ParameterError& e) {
        throw ParameterError("config section [" + sec.name + "]: " + e.what());
      }
    }
    out.push_back(std::move(*sc));
  }
  return out;
}

std::vector<Scenario> load_scenario_config(const std::string& path) {
  return parse_scenario_config(read_file(path));
}

}  // namespace esu
