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

#include <cmath>
#include <utility>
#include <variant>
#include <vector>

#include "esu/errors.hpp"

namespace esu {

inline constexpr double kPi = 3.14159265358979323846;

/// Point or vector in the plane.
struct Vec2 {
  double x1 = 0.0;
  double x2 = 0.0;

  constexpr Vec2& operator+=(const Vec2& o) {
    x1 += o.x1;
    x2 += o.x2;
    return *this;
  }
  constexpr Vec2& operator-=(const Vec2& o) {
    x1 -= o.x1;
    x2 -= o.x2;
    return *this;
  }
  constexpr Vec2& operator*=(double s) {
    x1 *= s;
    x2 *= s;
    return *this;
  }
  friend constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
  friend constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
  friend constexpr Vec2 operator/(Vec2 a, double s) { return a *= (1.0 / s); }
  friend constexpr Vec2 operator-(const Vec2& a) { return {-a.x1, -a.x2}; }
  friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

constexpr double dot(const Vec2& a, const Vec2& b) { return a.x1 * b.x1 + a.x2 * b.x2; }
inline double norm(const Vec2& a) { return std::hypot(a.x1, a.x2); }
constexpr double squared_norm(const Vec2& a) { return dot(a, a); }
inline bool is_finite(const Vec2& a) { return std::isfinite(a.x1) && std::isfinite(a.x2); }

// ---------------------------------------------------------------------------
// Target paths

/// gamma(t) = p.
struct ConstantPath {
  Vec2 point;
};

/// gamma(t) = (0.1 t, sin(0.1 t)).
struct LineSinePath {};

/// gamma(t) = (0.8 cos(0.025 t) + 0.08, 0.8 sin(0.05 t) + 0.5).
struct FigureEightPath {};

/// Piecewise-linear interpolation through strictly time-increasing samples.
struct TabulatedPath {
  std::vector<std::pair<double, Vec2>> samples;
};

/// The moving extremum gamma(t) of the cost.
class TargetPath {
public:
  using Kind = std::variant<ConstantPath, LineSinePath, FigureEightPath, TabulatedPath>;

  TargetPath() : TargetPath(ConstantPath{}) {}
  TargetPath(Kind kind);  // NOLINT: implicit from the kinds is intentional

  static TargetPath constant(Vec2 p) { return TargetPath(ConstantPath{p}); }
  static TargetPath line_sine() { return TargetPath(LineSinePath{}); }
  static TargetPath figure_eight() { return TargetPath(FigureEightPath{}); }
  static TargetPath tabulated(std::vector<std::pair<double, Vec2>> samples) {
    return TargetPath(TabulatedPath{std::move(samples)});
  }

  const Kind& kind() const { return kind_; }
  bool is_constant() const { return std::holds_alternative<ConstantPath>(kind_); }

  /// gamma(t). Throws RangeError for tabulated paths queried outside the table.
  Vec2 eval(double t) const;

  /// Exact derivative of gamma (segment slope for tabulated paths).
  Vec2 velocity(double t) const;

  /// Bound nu on |gamma'| valid for all t where the path is defined.
  double nu_bound() const { return nu_bound_; }

private:
  Kind kind_;
  double nu_bound_ = 0.0;
};

Vec2 eval_target(const TargetPath& path, double t);

/// A valid nu for the window [t0, t_end]. Analytic kinds return their exact
/// supremum; tabulated paths return the largest segment slope touching the
/// window, inflated by 10%.
double target_speed_bound(const TargetPath& path, double t0, double t_end);

// ---------------------------------------------------------------------------
// Cost

/// J(x, t) = kappa |x - gamma(t)|^2.
class CostFunction {
public:
  CostFunction(double kappa, TargetPath path);

  double kappa() const { return kappa_; }
  const TargetPath& path() const { return path_; }

  double eval(const Vec2& x, double t) const { return kappa_ * squared_norm(x - path_.eval(t)); }
  Vec2 gradient(const Vec2& x, double t) const { return 2.0 * kappa_ * (x - path_.eval(t)); }

private:
  double kappa_;
  TargetPath path_;
};

double eval_cost(const CostFunction& cost, const Vec2& x, double t);
Vec2 cost_gradient(const CostFunction& cost, const Vec2& x, double t);

/// Sublevel sets {x : J(x, t) <= lambda}; closed disks around gamma(t).
class LevelSetFamily {
public:
  LevelSetFamily(CostFunction cost, double lambda);

  double lambda() const { return lambda_; }
  double radius() const { return std::sqrt(lambda_ / cost_.kappa()); }
  bool contains(const Vec2& x, double t) const { return cost_.eval(x, t) <= lambda_; }
  /// Euclidean distance from x to the set at time t (0 inside).
  double distance(const Vec2& x, double t) const;

private:
  CostFunction cost_;
  double lambda_;
};

// ---------------------------------------------------------------------------
// Simulation configuration and output

struct SimConfig {
  Vec2 x0{};
  double t0 = 0.0;
  double t_end = 1.0;
  double Omega = 1.0;  ///< heading rate [rad/s]
  int k = 2;           ///< dither/heading frequency ratio
  double theta0 = 0.0;
  int steps_per_fast_period = 200;

  double omega() const { return k * Omega; }
  double fast_period() const { return 2.0 * kPi / omega(); }
  double heading(double t) const { return theta0 + Omega * (t - t0); }

  /// Throws ParameterError when a field is out of range.
  void validate() const;
};

struct Sample {
  double t = 0.0;
  Vec2 x{};
  Vec2 gamma{};
  double theta = 0.0;
  double u = 0.0;
  double J = 0.0;
  double err = 0.0;
};

struct Trajectory {
  std::vector<Sample> samples;

  bool empty() const { return samples.empty(); }
  std::size_t size() const { return samples.size(); }
  const Sample& front() const { return samples.front(); }
  const Sample& back() const { return samples.back(); }
};

}  // namespace esu
