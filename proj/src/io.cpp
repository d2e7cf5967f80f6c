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

#include "esu/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include <unistd.h>

namespace esu {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last || first == last)
    throw ParameterError("expected a number, got '" + std::string(text) + "'");
  return v;
}

std::size_t csv_stride(std::size_t samples) {
  return samples <= kMaxCsvRows ? 1 : (samples + kMaxCsvRows - 1) / kMaxCsvRows;
}

std::string trajectory_csv(const Trajectory& traj, std::size_t stride) {
  if (stride == 0) stride = 1;
  std::string out = "t,x1,x2,gamma1,gamma2,theta,u,J,err\n";
  auto row = [&out](const Sample& s) {
    for (double v : {s.t, s.x.x1, s.x.x2, s.gamma.x1, s.gamma.x2, s.theta, s.u, s.J}) {
      out += format_double(v);
      out += ',';
    }
    out += format_double(s.err);
    out += '\n';
  };
  const auto n = traj.samples.size();
  for (std::size_t i = 0; i < n; i += stride) row(traj.samples[i]);
  if (n > 0 && (n - 1) % stride != 0) row(traj.samples.back());
  return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error("cannot rename '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParameterError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_summary(const Summary& summary) {
  std::string out;
  for (const auto& [k, v] : summary) out += k + " = " + v + "\n";
  return out;
}

Summary parse_summary(std::string_view text) {
  Summary out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) continue;
    out[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return out;
}

}  // namespace esu
