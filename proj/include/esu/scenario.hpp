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

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "esu/analysis.hpp"
#include "esu/control_family.hpp"
#include "esu/core.hpp"

namespace esu {

/// Experimentally tuned gain for one law: alpha_product replaces
/// amplitude_scale^2 * vartheta * alpha(k) so that the dither amplitude is
/// sqrt(alpha_product * omega).
struct TunedLawParams {
  double alpha_product = 0.0;
  double kappa = 0.0;
};

struct Scenario {
  std::string name;
  std::string description;
  SimConfig config;
  TargetPath path;
  double kappa = 1.0;
  double vartheta = 1.0;
  LawKind default_law = LawKind::Cont1;
  std::map<LawKind, TunedLawParams> tuned;

  // Explicit overrides win over the tuned table.
  std::optional<double> vartheta_override;
  std::optional<double> kappa_override;
  std::optional<double> amplitude_scale;

  // Custom law: catalog F1 plus (z_ref, c0) for the numeric F2.
  std::string custom_f1 = "identity";
  double z_ref = 1.0;
  double c0 = -1.0;

  /// Law, cost and config for the given law kind.
  StudySetup setup(LawKind kind) const;
};

/// Built-in scenarios: sim-moving, exp-fixed, exp-eight, fixed-origin.
const std::vector<Scenario>& scenario_catalog();
std::optional<Scenario> find_scenario(std::string_view name);

/// Applies one `key = value` assignment. Throws ParameterError for unknown
/// keys or malformed values. `omega` is accepted only if omega / Omega is an
/// integer >= 2 and then sets k.
void apply_override(Scenario& sc, std::string_view key, std::string_view value);
/// Parses "key=value".
void apply_override(Scenario& sc, std::string_view assignment);

/// Flat config text: `[name]` sections of `key = value` lines, `#` comments.
/// A section starts from the catalog scenario named by its `base` key
/// (default sim-moving).
std::vector<Scenario> parse_scenario_config(std::string_view text);
std::vector<Scenario> load_scenario_config(const std::string& path);

}  // namespace esu
