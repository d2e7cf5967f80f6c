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

#include "esu/core.hpp"

#include <algorithm>
#include <sstream>

namespace esu {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Index i of the segment [t_i, t_{i+1}] containing t.
std::size_t find_segment(const TabulatedPath& tab, double t) {
  const auto& s = tab.samples;
  if (t < s.front().first || t > s.back().first) {
    std::ostringstream os;
    os << "time " << t << " outside tabulated range [" << s.front().first << ", " << s.back().first
       << "]";
    throw RangeError(os.str());
  }
  auto it = std::upper_bound(s.begin(), s.end(), t,
                             [](double v, const auto& sample) { return v < sample.first; });
  auto idx = static_cast<std::size_t>(std::distance(s.begin(), it));
  return std::min(idx == 0 ? 0 : idx - 1, s.size() - 2);
}

Vec2 segment_slope(const TabulatedPath& tab, std::size_t i) {
  const auto& [ta, pa] = tab.samples[i];
  const auto& [tb, pb] = tab.samples[i + 1];
  return (pb - pa) / (tb - ta);
}

}  // namespace

TargetPath::TargetPath(Kind kind) : kind_(std::move(kind)) {
  nu_bound_ = std::visit(
      Overloaded{
          [](const ConstantPath& c) {
            if (!is_finite(c.point)) throw ParameterError("constant target must be finite");
            return 0.0;
          },
          // |gamma'| = 0.1 sqrt(1 + cos^2(0.1 t)), maximal where cos = +-1.
          [](const LineSinePath&) { return 0.1 * std::sqrt(2.0); },
          // |gamma'|^2 = 0.02^2 (s + 4 (1 - 2 s)^2) with s = sin^2(0.025 t); convex in s,
          // so the maximum sits at s = 1 and equals 0.02^2 * 5.
          [](const FigureEightPath&) { return 0.02 * std::sqrt(5.0); },
          [](const TabulatedPath& tab) {
            if (tab.samples.size() < 2) throw ParameterError("tabulated path needs >= 2 samples");
            double vmax = 0.0;
            for (std::size_t i = 0; i + 1 < tab.samples.size(); ++i) {
              if (!(tab.samples[i + 1].first > tab.samples[i].first))
                throw ParameterError("tabulated path samples must be strictly time-increasing");
              if (!is_finite(tab.samples[i].second) || !is_finite(tab.samples[i + 1].second))
                throw ParameterError("tabulated path samples must be finite");
              vmax = std::max(vmax, norm(segment_slope(tab, i)));
            }
            return 1.1 * vmax;
          },
      },
      kind_);
}

Vec2 TargetPath::eval(double t) const {
  return std::visit(Overloaded{
                        [](const ConstantPath& c) { return c.point; },
                        [t](const LineSinePath&) { return Vec2{0.1 * t, std::sin(0.1 * t)}; },
                        [t](const FigureEightPath&) {
                          return Vec2{0.8 * std::cos(0.025 * t) + 0.08,
                                      0.8 * std::sin(0.05 * t) + 0.5};
                        },
                        [t](const TabulatedPath& tab) {
                          const std::size_t i = find_segment(tab, t);
                          const auto& [ta, pa] = tab.samples[i];
                          const auto& [tb, pb] = tab.samples[i + 1];
                          const double w = (t - ta) / (tb - ta);
                          return pa + w * (pb - pa);
                        },
                    },
                    kind_);
}

Vec2 TargetPath::velocity(double t) const {
  return std::visit(Overloaded{
                        [](const ConstantPath&) { return Vec2{}; },
                        [t](const LineSinePath&) { return Vec2{0.1, 0.1 * std::cos(0.1 * t)}; },
                        [t](const FigureEightPath&) {
                          return Vec2{-0.02 * std::sin(0.025 * t), 0.04 * std::cos(0.05 * t)};
                        },
                        [t](const TabulatedPath& tab) { return segment_slope(tab, find_segment(tab, t)); },
                    },
                    kind_);
}

Vec2 eval_target(const TargetPath& path, double t) { return path.eval(t); }

double target_speed_bound(const TargetPath& path, double t0, double t_end) {
  if (!(t_end > t0)) throw ParameterError("target_speed_bound: t_end must exceed t0");
  const auto* tab = std::get_if<TabulatedPath>(&path.kind());
  if (tab == nullptr) return path.nu_bound();

  double vmax = 0.0;
  for (std::size_t i = 0; i + 1 < tab->samples.size(); ++i) {
    const double ta = tab->samples[i].first;
    const double tb = tab->samples[i + 1].first;
    if (tb < t0 || ta > t_end) continue;
    vmax = std::max(vmax, norm(segment_slope(*tab, i)));
  }
  return 1.1 * vmax;
}

CostFunction::CostFunction(double kappa, TargetPath path) : kappa_(kappa), path_(std::move(path)) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw ParameterError("cost: kappa must be > 0");
}

double eval_cost(const CostFunction& cost, const Vec2& x, double t) { return cost.eval(x, t); }

Vec2 cost_gradient(const CostFunction& cost, const Vec2& x, double t) {
  return cost.gradient(x, t);
}

LevelSetFamily::LevelSetFamily(CostFunction cost, double lambda)
    : cost_(std::move(cost)), lambda_(lambda) {
  if (!(lambda > 0.0)) throw ParameterError("level set: lambda must be > 0");
}

double LevelSetFamily::distance(const Vec2& x, double t) const {
  return std::max(0.0, norm(x - cost_.path().eval(t)) - radius());
}

void SimConfig::validate() const {
  if (!is_finite(x0)) throw ParameterError("config: x0 must be finite");
  if (!(t0 >= 0.0)) throw ParameterError("config: t0 must be >= 0");
  if (!(t_end > t0) || !std::isfinite(t_end)) throw ParameterError("config: t_end must exceed t0");
  if (!(Omega > 0.0) || !std::isfinite(Omega)) throw ParameterError("config: Omega must be > 0");
  if (k < 2) throw ParameterError("config: k must be an integer >= 2");
  if (!std::isfinite(theta0)) throw ParameterError("config: theta0 must be finite");
  if (steps_per_fast_period < 1) throw ParameterError("config: steps_per_fast_period must be >= 1");
}

}  // namespace esu
