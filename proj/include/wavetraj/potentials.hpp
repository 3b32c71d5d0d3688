#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <variant>

#include "wavetraj/types.hpp"

namespace wavetraj {

// External fields in internal units: positions in w0, energies in E.

struct Free {};

/// Uniform force of magnitude `force` pointing along -z; V = force * z.
struct ConstantForce {
  double force = 0.0;
};

/// V = height * exp(-2 (z - center)^2 / width^2).
struct GaussianBarrier {
  double height = 0.0;
  double center = 0.0;
  double width = 1.0;
};

/// V = height / (1 + exp(-slope (z - flex))). Rises from 0 to `height`.
struct LogisticStep {
  double height = 0.0;
  double flex = 0.0;
  double slope = 1.0;
};

/// V = stiffness * z^2 / 2, with stiffness = m omega^2.
struct Harmonic {
  double stiffness = 0.0;
};

/// V = strength * s(z) * x^2 for z in [z_begin, z_end].
///
/// s(z) is 1 on the middle half of the slab and falls to 0 at both faces
/// through a half-cosine taper, so V is C1 everywhere.
struct LensLike {
  double strength = 0.0;
  double z_begin = 0.0;
  double z_end = 1.0;
};

using PotentialField =
    std::variant<Free, ConstantForce, GaussianBarrier, LogisticStep, Harmonic, LensLike>;

/// Refractive index fields for classical waves.
struct UniformIndex {
  double n0 = 1.0;
};

/// n^2 = n0^2 (1 - gradient_scale * x^2): a transversely graded guide.
struct RadialParabolicIndex {
  double n0 = 1.0;
  double gradient_scale = 0.0;
};

using RefractiveIndexField = std::variant<UniformIndex, RadialParabolicIndex>;

namespace detail {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

template <typename T>
struct LensProfile {
  T value;
  T slope;
};

template <typename T>
LensProfile<T> lens_profile(const LensLike& lens, T z) {
  const T a = T(lens.z_begin);
  const T b = T(lens.z_end);
  const T q = (b - a) / T(4);
  const T pi = std::numbers::pi_v<T>;
  if (z <= a || z >= b) return {T(0), T(0)};
  if (z < a + q) {
    const T u = pi * (z - a) / q;
    return {(T(1) - std::cos(u)) / T(2), pi * std::sin(u) / (T(2) * q)};
  }
  if (z > b - q) {
    const T u = pi * (b - z) / q;
    return {(T(1) - std::cos(u)) / T(2), -pi * std::sin(u) / (T(2) * q)};
  }
  return {T(1), T(0)};
}

// Logistic sigma(u) = 1 / (1 + exp(-u)) without overflow on either side.
template <typename T>
T logistic(T u) {
  if (u >= T(0)) return T(1) / (T(1) + std::exp(-u));
  const T e = std::exp(u);
  return e / (T(1) + e);
}

}  // namespace detail

template <typename T>
T eval_potential(const PotentialField& field, const Vec2<T>& r) {
  const T x = r(kX);
  const T z = r(kZ);
  return std::visit(
      detail::overloaded{
          [](const Free&) { return T(0); },
          [&](const ConstantForce& f) { return T(f.force) * z; },
          [&](const GaussianBarrier& b) {
            const T u = (z - T(b.center)) / T(b.width);
            return T(b.height) * std::exp(T(-2) * u * u);
          },
          [&](const LogisticStep& s) {
            return T(s.height) * detail::logistic(T(s.slope) * (z - T(s.flex)));
          },
          [&](const Harmonic& h) { return T(h.stiffness) * z * z / T(2); },
          [&](const LensLike& l) {
            return T(l.strength) * detail::lens_profile(l, z).value * x * x;
          },
      },
      field);
}

template <typename T>
Vec2<T> eval_gradient(const PotentialField& field, const Vec2<T>& r) {
  const T x = r(kX);
  const T z = r(kZ);
  return std::visit(
      detail::overloaded{
          [](const Free&) { return Vec2<T>(T(0), T(0)); },
          [&](const ConstantForce& f) { return Vec2<T>(T(0), T(f.force)); },
          [&](const GaussianBarrier& b) {
            const T u = (z - T(b.center)) / T(b.width);
            const T v = T(b.height) * std::exp(T(-2) * u * u);
            return Vec2<T>(T(0), T(-4) * u / T(b.width) * v);
          },
          [&](const LogisticStep& s) {
            const T sig = detail::logistic(T(s.slope) * (z - T(s.flex)));
            return Vec2<T>(T(0), T(s.height) * T(s.slope) * sig * (T(1) - sig));
          },
          [&](const Harmonic& h) { return Vec2<T>(T(0), T(h.stiffness) * z); },
          [&](const LensLike& l) {
            const auto p = detail::lens_profile(l, z);
            return Vec2<T>(T(2) * T(l.strength) * p.value * x, T(l.strength) * p.slope * x * x);
          },
      },
      field);
}

template <typename T>
T eval_index(const RefractiveIndexField& field, const Vec2<T>& r) {
  return std::visit(detail::overloaded{
                        [](const UniformIndex& u) { return T(u.n0); },
                        [&](const RadialParabolicIndex& g) {
                          const T x = r(kX);
                          return T(g.n0) * std::sqrt(T(1) - T(g.gradient_scale) * x * x);
                        },
                    },
                    field);
}

/// Gradient of n^2, the combination the classical ray equations consume.
template <typename T>
Vec2<T> eval_index_gradient(const RefractiveIndexField& field, const Vec2<T>& r) {
  return std::visit(detail::overloaded{
                        [](const UniformIndex&) { return Vec2<T>(T(0), T(0)); },
                        [&](const RadialParabolicIndex& g) {
                          const T n0 = T(g.n0);
                          return Vec2<T>(T(-2) * n0 * n0 * T(g.gradient_scale) * r(kX), T(0));
                        },
                    },
                    field);
}

/// Largest |d^2 V / ds^2| the field can show, used to bound the time step.
double curvature_scale(const PotentialField& field);

/// Distance along `direction` from `launch` to the first point where V equals
/// `energy`, located by bracketing bisection to 1e-12 relative. Empty when V
/// never reaches `energy` ahead of the launch point.
std::optional<double> classical_turning_point(const PotentialField& field, double energy,
                                              const Vec2d& launch, const Vec2d& direction,
                                              double max_distance = 1e7);

}  // namespace wavetraj
