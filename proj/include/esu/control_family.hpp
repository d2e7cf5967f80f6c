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

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "esu/core.hpp"

namespace esu {

using ScalarFn = std::function<double(double)>;

/// Shaping functions (F1, F2) of the control family, tied by
/// F1 F2' - F1' F2 = -1 away from the zeros of F1.
struct FPair {
  ScalarFn F1;
  ScalarFn F2;
  /// d/dz (F1^2 + F2^2). Empty means "use central differences".
  ScalarFn dsum;
  /// Points where F1, F2 are only continuous (derivatives blow up).
  std::vector<double> singular_points;
  std::string zero_set_note;
};

enum class LawKind { Cont1, Cont2, Cont3, Cont4, Custom };

std::string_view to_string(LawKind kind);
/// Parses "cont1".."cont4" and "custom"; throws ParameterError otherwise.
LawKind parse_law_kind(std::string_view name);

/// alpha = 4 (1 - 1/k^2).
double alpha_for(int k);

class ControlLaw {
public:
  ControlLaw(LawKind kind, FPair pair, double vartheta, int k, double Omega,
             double amplitude_scale = 1.0);

  LawKind kind() const { return kind_; }
  const FPair& pair() const { return pair_; }
  double vartheta() const { return vartheta_; }
  int k() const { return k_; }
  double Omega() const { return Omega_; }
  double amplitude_scale() const { return amplitude_scale_; }

  double omega() const { return k_ * Omega_; }
  double alpha() const { return alpha_for(k_); }
  /// amplitude_scale * sqrt(vartheta alpha omega): the dither amplitude per unit F.
  double gain() const { return gain_; }
  /// Gradient gain of the averaged flow, amplitude_scale^2 * vartheta.
  double effective_gain() const { return amplitude_scale_ * amplitude_scale_ * vartheta_; }

  /// Same law with a different heading rate (k kept, so omega scales too).
  ControlLaw with_Omega(double Omega) const;
  ControlLaw with_k(int k) const;

private:
  LawKind kind_;
  FPair pair_;
  double vartheta_;
  int k_;
  double Omega_;
  double amplitude_scale_;
  double gain_;
};

/// The four laws used in the moving-target examples. Cont2 carries
/// amplitude_scale = 1/sqrt(2).
ControlLaw make_builtin_law(LawKind kind, double vartheta, int k, double Omega);
FPair builtin_pair(LawKind kind);

/// F1 choices available for custom laws.
std::vector<std::string> f1_catalog();
ScalarFn catalog_f1(std::string_view name);

/// F2(z) = -F1(z) (c0 + int_{z_ref}^{z} ds / F1(s)^2), evaluated by adaptive
/// quadrature. Queries on the far side of a zero of F1 throw DomainError.
ScalarFn derive_F2_numeric(ScalarFn F1, double z_ref, double c0);

/// Custom law: catalog F1 with numerically derived F2.
ControlLaw make_custom_law(std::string_view f1_name, double z_ref, double c0, double vartheta,
                           int k, double Omega, double amplitude_scale = 1.0);

/// u = gain (F1(J) cos(omega t) + F2(J) sin(omega t)).
double eval_control(const ControlLaw& law, double t, double J_value);

inline constexpr double kGuardBand = 1e-3;
inline constexpr double kFdStep = 1e-6;

/// True when z lies within `band` of a singular point or of a zero of F1.
bool in_guard_band(const FPair& pair, double z, double band = kGuardBand);

/// max over the grid of |F1 F2' - F1' F2 + 1| with central differences.
/// Throws DomainError naming the first grid point inside the guard band.
double wronskian_residual(const FPair& pair, std::span<const double> z_grid);

/// d/dz (F1^2 + F2^2) at z, analytic when the pair provides it.
double sum_derivative(const FPair& pair, double z);

/// Rotational part of the Lie-bracket system,
/// Phi = (1 / 2k) d/dz(F1^2 + F2^2)(J) * (dJ/dx2, -dJ/dx1).
/// Orthogonal to grad J by construction.
Vec2 phi_field(const ControlLaw& law, const CostFunction& cost, const Vec2& x, double t);

/// Closed form of the Lie-bracket system:
/// amplitude_scale^2 * (-vartheta grad J + Phi).
Vec2 averaged_field(const ControlLaw& law, const CostFunction& cost, const Vec2& x, double t);

}  // namespace esu
