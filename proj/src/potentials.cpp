#include "wavetraj/potentials.hpp"

#include <algorithm>
#include <limits>

namespace wavetraj {

double curvature_scale(const PotentialField& field) {
  return std::visit(detail::overloaded{
                        [](const Free&) { return 0.0; },
                        [](const ConstantForce&) { return 0.0; },
                        [](const GaussianBarrier& b) { return 4.0 * b.height / (b.width * b.width); },
                        [](const LogisticStep& s) { return 0.1 * s.height * s.slope * s.slope; },
                        [](const Harmonic& h) { return h.stiffness; },
                        [](const LensLike& l) { return 2.0 * l.strength; },
                    },
                    field);
}

namespace {

// March resolution along the ray: fine enough to never step over a barrier top.
std::optional<double> march_step(const PotentialField& field) {
  return std::visit(detail::overloaded{
                        [](const Free&) -> std::optional<double> { return std::nullopt; },
                        [](const ConstantForce& f) -> std::optional<double> {
                          if (f.force <= 0.0) return std::nullopt;
                          return 1.0 / (64.0 * f.force);
                        },
                        [](const GaussianBarrier& b) -> std::optional<double> { return b.width / 64.0; },
                        [](const LogisticStep& s) -> std::optional<double> { return 1.0 / (64.0 * s.slope); },
                        [](const Harmonic& h) -> std::optional<double> {
                          if (h.stiffness <= 0.0) return std::nullopt;
                          return 1.0 / (64.0 * std::sqrt(h.stiffness));
                        },
                        [](const LensLike& l) -> std::optional<double> { return (l.z_end - l.z_begin) / 256.0; },
                    },
                    field);
}

}  // namespace

std::optional<double> classical_turning_point(const PotentialField& field, double energy,
                                              const Vec2d& launch, const Vec2d& direction,
                                              double max_distance) {
  const auto step = march_step(field);
  if (!step) return std::nullopt;
  const Vec2d dir = direction.normalized();
  auto excess = [&](double s) { return eval_potential<double>(field, launch + s * dir) - energy; };

  if (excess(0.0) >= 0.0) return 0.0;
  // bracket the first upward crossing
  double lo = 0.0;
  double hi = 0.0;
  bool found = false;
  for (double s = *step; s <= max_distance; s += *step) {
    if (excess(s) >= 0.0) {
      hi = s;
      found = true;
      break;
    }
    lo = s;
  }
  if (!found) return std::nullopt;

  while (hi - lo > 1e-12 * std::max(1.0, std::abs(hi))) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (excess(mid) >= 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace wavetraj
