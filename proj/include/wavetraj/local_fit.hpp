#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace wavetraj {

/// Least-squares quadratic p(s) = c0 + c1 (s - center) + c2 (s - center)^2.
template <typename T>
struct QuadraticFit {
  T center = T(0);
  T c0 = T(0);
  T c1 = T(0);
  T c2 = T(0);

  T value(T s) const {
    const T u = s - center;
    return c0 + (c1 + c2 * u) * u;
  }
  T slope(T s) const { return c1 + T(2) * c2 * (s - center); }
  T curvature() const { return T(2) * c2; }
};

/// Fits a quadratic to (xs, ys) on an arbitrary (nonuniform) grid, optionally
/// weighted (empty `weights` means uniform).
///
/// The abscissae are shifted to `center` and scaled to unit spread before a
/// Householder QR solve, so the conditioning does not depend on grid spacing.
/// Needs at least three distinct abscissae.
template <typename T>
QuadraticFit<T> fit_quadratic(std::span<const T> xs, std::span<const T> ys, T center,
                              std::span<const T> weights = {}) {
  using Design = Eigen::Matrix<T, Eigen::Dynamic, 3>;
  using Column = Eigen::Matrix<T, Eigen::Dynamic, 1>;
  const auto n = static_cast<Eigen::Index>(xs.size());

  T spread = T(0);
  for (const T x : xs) spread = std::max(spread, std::abs(x - center));
  if (spread == T(0)) spread = T(1);

  Design a(n, 3);
  Column b(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const T u = (xs[k] - center) / spread;
    const T root = weights.empty() ? T(1) : std::sqrt(weights[k]);
    a(k, 0) = root;
    a(k, 1) = root * u;
    a(k, 2) = root * u * u;
    b(k) = root * ys[k];
  }
  const Eigen::Matrix<T, 3, 1> c = a.householderQr().solve(b);

  QuadraticFit<T> fit;
  fit.center = center;
  fit.c0 = c(0);
  fit.c1 = c(1) / spread;
  fit.c2 = c(2) / (spread * spread);
  return fit;
}

/// Gaussian weight of a sample `offset` rays away from the kernel centre, with
/// width half_window / 4. Uniform weights leave a band of transverse modes
/// whose fitted curvature has the wrong sign, which the coupled ray dynamics
/// amplifies; this kernel keeps the fitted slope and curvature responses
/// sign-definite.
template <typename T>
T fit_weight(int offset, int half_window) {
  const T u = T(4) * T(offset) / T(half_window);
  return std::exp(T(-0.5) * u * u);
}

/// Picks `2 * half_window + 1` consecutive entries of a list of `count` usable
/// samples around position `at`, sliding the window inward near either end.
/// Returns [first, last) into the usable list.
inline std::pair<int, int> fit_window_bounds(int count, int at, int half_window) {
  const int width = std::min(count, 2 * half_window + 1);
  int first = at - half_window;
  first = std::clamp(first, 0, count - width);
  return {first, first + width};
}

}  // namespace wavetraj
