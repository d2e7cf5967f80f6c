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

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "esu/core.hpp"

namespace esu {

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);
/// Parses a whole string as a double; throws ParameterError otherwise.
double parse_double(std::string_view text);

inline constexpr std::size_t kMaxCsvRows = 100000;

/// Keep every stride-th sample so that at most kMaxCsvRows rows remain.
std::size_t csv_stride(std::size_t samples);

/// t,x1,x2,gamma1,gamma2,theta,u,J,err with a header row and LF endings.
std::string trajectory_csv(const Trajectory& traj, std::size_t stride = 1);

/// Writes through a temporary file in the same directory and renames it.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

/// Flat `key = value` summaries.
using Summary = std::map<std::string, std::string>;
std::string format_summary(const Summary& summary);
Summary parse_summary(std::string_view text);

}  // namespace esu
