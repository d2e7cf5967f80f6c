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

#include "esu/control_family.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace esu {
namespace {

// Cont4 amplitude phi(z) = (1 - e^{-|z|}) / (1 + e^{z}), written to avoid overflow.
double cont4_phi(double z) {
  const double a = std::abs(z);
  const double num = -std::expm1(-a);
  if (z > 0.0) return std::exp(-z) * num / (1.0 + std::exp(-z));
  return num / (1.0 + std::exp(z));
}

// psi(z) = e^{|z|} + 2 ln(e^{|z|} - 1).
double cont4_psi(double z) {
  const double a = std::abs(z);
  return std::exp(a) + 2.0 * std::log(std::expm1(a));
}

constexpr double kCont4Clamp = 1e-300;

double cont4_F(double z, bool first) {
  if (std::abs(z) < kCont4Clamp) return 0.0;
  const double phi = cont4_phi(z);
  const double psi = cont4_psi(z);
  if (phi == 0.0 || !std::isfinite(psi)) return 0.0;
  return std::sqrt(phi) * (first ? std::sin(psi) : std::cos(psi));
}

// phi'(z) for z >= 0: (2 + e^{-z} - e^{z}) / (1 + e^{z})^2.
double cont4_dphi(double z) {
  if (z > 0.0) {
    const double e = std::exp(-z);
    return (2.0 * e * e + e * e * e - e) / ((1.0 + e) * (1.0 + e));
  }
  const double e = std::exp(z);
  return (2.0 + 1.0 / e - e) / ((1.0 + e) * (1.0 + e));
}

double sqrt_sin_log(double z) {
  if (z == 0.0) return 0.0;
  const double a = std::abs(z);
  return std::sqrt(a) * std::sin(std::log(a));
}

double sqrt_cos_log(double z) {
  if (z == 0.0) return 0.0;
  const double a = std::abs(z);
  return std::sqrt(a) * std::cos(std::log(a));
}

// F2 = -F1 (c0 + int_{z_ref}^{z} ds / F1^2).
class NumericF2 {
public:
  NumericF2(ScalarFn F1, double z_ref, double c0) : F1_(std::move(F1)), z_ref_(z_ref), c0_(c0) {
    const double f = F1_(z_ref_);
    if (!(std::isfinite(f) && f != 0.0))
      throw DomainError("derive_F2_numeric: F1(z_ref) must be finite and non-zero");
    ref_sign_ = f > 0.0 ? 1 : -1;
  }

  double operator()(double z) const {
    check_zero_free(z);
    const double fz = F1_(z);
    if (z == z_ref_) return -fz * c0_;
    auto integrand = [this](double s) {
      const double f = F1_(s);
      return 1.0 / (f * f);
    };
    // Pieces graded geometrically towards z until |F1| changes by less than 2x,
    // so each piece sees a mildly varying integrand even next to a zero of F1.
    double integral = 0.0, err = 0.0;
    double a = z_ref_;
    for (int j = 1; j <= kMaxPieces; ++j) {
      const double b = z + (z_ref_ - z) * std::ldexp(1.0, -j);
      const bool last = j == kMaxPieces || std::abs(F1_(b)) <= 2.0 * std::abs(fz);
      const double end = last ? z : b;
      // Integrate on [-1, 1]: Boost compares an unscaled error estimate with a
      // scaled tolerance, which misfires on short intervals.
      const double mid = 0.5 * (a + end), half = 0.5 * (end - a);
      auto unit = [&](double tau) { return half * integrand(mid + half * tau); };
      double piece_err = 0.0;
      integral += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
          unit, -1.0, 1.0, 15, 1e-12, &piece_err);
      err += piece_err;
      if (last) break;
      a = end;
    }
    if (!std::isfinite(integral)) throw DomainError("derive_F2_numeric: divergent integral");
    if (err > kErrGuard * std::max(1.0, std::abs(integral))) {
      std::ostringstream os;
      os << "derive_F2_numeric: quadrature error estimate " << err << " at z = " << z;
      throw NumericError(os.str());
    }
    return -fz * (c0_ + integral);
  }

private:
  static constexpr double kErrGuard = 1e-10;
  static constexpr int kScan = 128;
  static constexpr int kMaxPieces = 60;

  void check_zero_free(double z) const {
    for (int i = 1; i <= kScan; ++i) {
      const double s = z_ref_ + (z - z_ref_) * (static_cast<double>(i) / kScan);
      const double f = F1_(s);
      if (!std::isfinite(f) || f == 0.0 || (f > 0.0 ? 1 : -1) != ref_sign_) {
        std::ostringstream os;
        os << "derive_F2_numeric: F1 vanishes between z_ref = " << z_ref_ << " and z = " << z;
        throw DomainError(os.str());
      }
    }
  }

  ScalarFn F1_;
  double z_ref_;
  double c0_;
  int ref_sign_ = 1;
};

}  // namespace

std::string_view to_string(LawKind kind) {
  switch (kind) {
    case LawKind::Cont1: return "cont1";
    case LawKind::Cont2: return "cont2";
    case LawKind::Cont3: return "cont3";
    case LawKind::Cont4: return "cont4";
    case LawKind::Custom: return "custom";
  }
  return "unknown";
}

LawKind parse_law_kind(std::string_view name) {
  for (auto kind : {LawKind::Cont1, LawKind::Cont2, LawKind::Cont3, LawKind::Cont4, LawKind::Custom})
    if (to_string(kind) == name) return kind;
  throw ParameterError("unknown law '" + std::string(name) + "'");
}

double alpha_for(int k) {
  const double kd = k;
  return 4.0 * (1.0 - 1.0 / (kd * kd));
}

ControlLaw::ControlLaw(LawKind kind, FPair pair, double vartheta, int k, double Omega,
                       double amplitude_scale)
    : kind_(kind),
      pair_(std::move(pair)),
      vartheta_(vartheta),
      k_(k),
      Omega_(Omega),
      amplitude_scale_(amplitude_scale) {
  if (k < 2) throw ParameterError("control law: k must be an integer >= 2");
  if (!(vartheta > 0.0) || !std::isfinite(vartheta))
    throw ParameterError("control law: vartheta must be > 0");
  if (!(Omega > 0.0) || !std::isfinite(Omega)) throw ParameterError("control law: Omega must be > 0");
  if (!(amplitude_scale > 0.0)) throw ParameterError("control law: amplitude_scale must be > 0");
  if (!pair_.F1 || !pair_.F2) throw ParameterError("control law: F1 and F2 are required");
  gain_ = amplitude_scale_ * std::sqrt(vartheta_ * alpha() * omega());
}

ControlLaw ControlLaw::with_Omega(double Omega) const {
  return ControlLaw(kind_, pair_, vartheta_, k_, Omega, amplitude_scale_);
}

ControlLaw ControlLaw::with_k(int k) const {
  return ControlLaw(kind_, pair_, vartheta_, k, Omega_, amplitude_scale_);
}

FPair builtin_pair(LawKind kind) {
  switch (kind) {
    case LawKind::Cont1:
      return {[](double z) { return z; }, [](double) { return 1.0; },
              [](double z) { return 2.0 * z; }, {}, "{0}"};
    case LawKind::Cont2:
      return {[](double z) { return std::sin(z); }, [](double z) { return std::cos(z); },
              [](double) { return 0.0; }, {}, "{n pi : n integer}"};
    case LawKind::Cont3:
      // F1^2 + F2^2 = |z|; one-sided derivative at 0 since J >= 0.
      return {sqrt_sin_log, sqrt_cos_log, [](double z) { return z < 0.0 ? -1.0 : 1.0; }, {0.0},
              "{0} and {+-e^{n pi} : n integer}"};
    case LawKind::Cont4:
      return {[](double z) { return cont4_F(z, true); }, [](double z) { return cont4_F(z, false); },
              cont4_dphi, {0.0}, "{0} and {z : psi(z) = n pi}, accumulating at 0"};
    case LawKind::Custom: break;
  }
  throw ParameterError("builtin_pair: custom laws have no built-in pair");
}

ControlLaw make_builtin_law(LawKind kind, double vartheta, int k, double Omega) {
  const double scale = kind == LawKind::Cont2 ? 1.0 / std::sqrt(2.0) : 1.0;
  return ControlLaw(kind, builtin_pair(kind), vartheta, k, Omega, scale);
}

std::vector<std::string> f1_catalog() {
  return {"identity", "sin", "sqrt_sin_log", "bounded_vanishing"};
}

ScalarFn catalog_f1(std::string_view name) {
  if (name == "identity") return [](double z) { return z; };
  if (name == "sin") return [](double z) { return std::sin(z); };
  if (name == "sqrt_sin_log") return sqrt_sin_log;
  if (name == "bounded_vanishing") return [](double z) { return cont4_F(z, true); };
  throw ParameterError("unknown F1 '" + std::string(name) + "'");
}

ScalarFn derive_F2_numeric(ScalarFn F1, double z_ref, double c0) {
  auto impl = std::make_shared<const NumericF2>(std::move(F1), z_ref, c0);
  return [impl](double z) { return (*impl)(z); };
}

ControlLaw make_custom_law(std::string_view f1_name, double z_ref, double c0, double vartheta,
                           int k, double Omega, double amplitude_scale) {
  ScalarFn F1 = catalog_f1(f1_name);
  FPair pair{F1, derive_F2_numeric(F1, z_ref, c0), {}, {}, "zeros of " + std::string(f1_name)};
  if (f1_name == "sqrt_sin_log" || f1_name == "bounded_vanishing") pair.singular_points = {0.0};
  return ControlLaw(LawKind::Custom, std::move(pair), vartheta, k, Omega, amplitude_scale);
}

double eval_control(const ControlLaw& law, double t, double J_value) {
  const double wt = law.omega() * t;
  const auto& p = law.pair();
  return law.gain() * (p.F1(J_value) * std::cos(wt) + p.F2(J_value) * std::sin(wt));
}

bool in_guard_band(const FPair& pair, double z, double band) {
  for (double s : pair.singular_points)
    if (std::abs(z - s) < band) return true;
  constexpr int kSamples = 64;
  double prev = pair.F1(z - band);
  if (prev == 0.0) return true;
  for (int i = 1; i <= kSamples; ++i) {
    const double cur = pair.F1(z - band + 2.0 * band * i / kSamples);
    if (cur == 0.0 || (cur > 0.0) != (prev > 0.0)) return true;
    prev = cur;
  }
  return false;
}

double wronskian_residual(const FPair& pair, std::span<const double> z_grid) {
  constexpr double h = kFdStep;
  double worst = 0.0;
  for (double z : z_grid) {
    if (in_guard_band(pair, z)) {
      std::ostringstream os;
      os << "wronskian_residual: grid point z = " << z << " lies inside the guard band ("
         << kGuardBand << ") of a zero or singular point of F1";
      throw DomainError(os.str());
    }
    const double f1 = pair.F1(z);
    const double f2 = pair.F2(z);
    const double d1 = (pair.F1(z + h) - pair.F1(z - h)) / (2.0 * h);
    const double d2 = (pair.F2(z + h) - pair.F2(z - h)) / (2.0 * h);
    worst = std::max(worst, std::abs(f1 * d2 - d1 * f2 + 1.0));
  }
  return worst;
}

double sum_derivative(const FPair& pair, double z) {
  if (pair.dsum) return pair.dsum(z);
  auto S = [&pair](double s) {
    const double a = pair.F1(s);
    const double b = pair.F2(s);
    return a * a + b * b;
  };
  constexpr double h = kFdStep;
  // J >= 0: stay on the admissible side near the origin.
  if (z < h) return (S(z + h) - S(z)) / h;
  return (S(z + h) - S(z - h)) / (2.0 * h);
}

Vec2 phi_field(const ControlLaw& law, const CostFunction& cost, const Vec2& x, double t) {
  const Vec2 g = cost.gradient(x, t);
  if (g == Vec2{}) return {};
  const double z = cost.eval(x, t);
  const double ds = sum_derivative(law.pair(), z);
  if (!std::isfinite(ds)) {
    std::ostringstream os;
    os << "phi_field: F1^2 + F2^2 not differentiable at J = " << z;
    throw DomainError(os.str());
  }
  const double c = ds / (2.0 * law.k());
  return {c * g.x2, -c * g.x1};
}

Vec2 averaged_field(const ControlLaw& law, const CostFunction& cost, const Vec2& x, double t) {
  const double s2 = law.amplitude_scale() * law.amplitude_scale();
  return s2 * (-law.vartheta() * cost.gradient(x, t) + phi_field(law, cost, x, t));
}

}  // namespace esu
