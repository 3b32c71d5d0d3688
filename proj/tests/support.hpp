#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "wavetraj/wavefront.hpp"

namespace wavetraj::testing {

/// A front of rays at the given positions, all with momentum `p`, amplitude
/// from `amplitude(xi)` and flux constants consistent with the flux law.
inline WaveFront make_front(const std::vector<Vec2d>& positions, const Vec2d& p,
                            const std::function<double(double)>& amplitude) {
  NumericsConfig num;
  num.n_rays = static_cast<int>(positions.size());
  const GaussianComponent g{0.0, 1.0};
  WaveFront f = init_gaussian_front(num, std::span(&g, 1), p);
  for (int i = 0; i < f.size(); ++i) f.position.col(i) = positions[i];
  refresh_geometry(f);
  for (int i = 0; i < f.size(); ++i) {
    f.amplitude(i) = amplitude(f.xi(i));
    f.flux_const(i) = f.amplitude(i) * f.amplitude(i) * p.norm() * tube_width(f, i);
  }
  return f;
}

/// Rays on the x axis at the given abscissae, launched along +z.
inline WaveFront make_flat_front(const std::vector<double>& xs, const std::function<double(double)>& amplitude) {
  std::vector<Vec2d> pos;
  for (double x : xs) pos.emplace_back(x, 0.0);
  return make_front(pos, Vec2d(0.0, 1.0), amplitude);
}

inline std::vector<double> uniform_grid(int n, double half) {
  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i) xs[i] = half * (2.0 * i - (n - 1)) / (n - 1);
  return xs;
}

/// Smoothly nonuniform, odd about the middle entry.
inline std::vector<double> stretched_grid(int n, double half) {
  auto xs = uniform_grid(n, half);
  for (auto& x : xs) x = x + 0.3 * std::sin(x);
  return xs;
}

}  // namespace wavetraj::testing
