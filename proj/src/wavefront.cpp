#include "wavetraj/wavefront.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wavetraj/errors.hpp"
#include "wavetraj/local_fit.hpp"

namespace wavetraj {

RayState WaveFront::ray(int i) const {
  return {position.col(i), momentum.col(i), amplitude(i), flux_const(i), id[i]};
}

WaveFront init_gaussian_front(const NumericsConfig& numerics,
                              std::span<const GaussianComponent> components,
                              const Vec2d& p_launch) {
  const int n = numerics.n_rays;
  const double half = numerics.front_half_width;
  WaveFront f;
  f.position.resize(2, n);
  f.momentum.resize(2, n);
  f.tangent.resize(2, n);
  f.amplitude.resize(n);
  f.flux_const.resize(n);
  f.xi.resize(n);
  f.id.resize(n);
  f.flags.assign(n, 0u);

  for (int i = 0; i < n; ++i) {
    // exact mirror symmetry: x_{n-1-i} == -x_i
    const double x = half * static_cast<double>(2 * i - (n - 1)) / static_cast<double>(n - 1);
    double r = 0.0;
    for (const auto& c : components) {
      const double u = x - c.center;
      r += c.weight * std::exp(-u * u);
    }
    f.position.col(i) = Vec2d(x, 0.0);
    f.momentum.col(i) = p_launch;
    f.amplitude(i) = r;
    f.id[i] = i;
  }
  const double peak = f.amplitude.maxCoeff();
  if (peak > 0.0) f.amplitude /= peak;

  refresh_geometry(f);
  for (int i = 0; i < n; ++i) {
    const double r = f.amplitude(i);
    f.flux_const(i) = r * r * f.momentum.col(i).norm() * tube_width(f, i);
  }
  f.wave.laplacian = RayValues::Zero(n);
  f.wave.potential = RayValues::Zero(n);
  f.wave.drive = RayValues::Zero(n);
  f.wave.force = RayColumns::Zero(2, n);
  return f;
}

void refresh_geometry(WaveFront& front, const WaveFront* previous) {
  const int n = front.size();
  front.tangent.resize(2, n);
  for (int i = 0; i < n; ++i) {
    // orient along increasing ray index, judged by the chord across the ray
    const Vec2d chord = front.position.col(std::min(i + 1, n - 1)) - front.position.col(std::max(i - 1, 0));
    const Vec2d p = front.momentum.col(i);
    const double pm = p.norm();
    if (pm < kMomentumClamp) {
      front.tangent.col(i) = previous ? Vec2d(previous->tangent.col(i)) : Vec2d(chord.normalized());
      continue;
    }
    Vec2d t = quarter_turn(p) / pm;
    if (t.dot(chord) < 0.0) t = -t;
    front.tangent.col(i) = t;
  }

  auto segment = [&](int i) {
    const Vec2d d = front.position.col(i + 1) - front.position.col(i);
    const double len = d.norm();
    const double side = d.dot(front.tangent.col(i) + front.tangent.col(i + 1));
    return side < 0.0 ? -len : len;
  };
  front.xi.resize(n);
  const int axis = front.axis_index();
  front.xi(axis) = 0.0;
  for (int i = axis + 1; i < n; ++i) front.xi(i) = front.xi(i - 1) + segment(i - 1);
  for (int i = axis - 1; i >= 0; --i) front.xi(i) = front.xi(i + 1) - segment(i);
}

double tube_width(const WaveFront& front, int i) {
  const int n = front.size();
  if (i == 0) return front.xi(1) - front.xi(0);
  if (i == n - 1) return front.xi(n - 1) - front.xi(n - 2);
  return 0.5 * (front.xi(i + 1) - front.xi(i - 1));
}

namespace {

// Fits `values` against xi around ray i using the usable rays only. Rows are
// listed outward-from-axis order on the left half so that mirror rays see
// mirrored design matrices and round identically. The kernel stays centred in
// the window, also where the window slides inward at the ends; samples carry
// their flux share so that near-empty edge rays cannot steer a fit.
QuadraticFit<double> local_fit(const WaveFront& front, const RayValues& values,
                               std::span<const int> usable, int i, int fit_window,
                               double& center) {
  const int count = static_cast<int>(usable.size());
  // position of ray i in the usable list, or of the nearest usable ray
  const auto it = std::lower_bound(usable.begin(), usable.end(), i);
  int at = static_cast<int>(it - usable.begin());
  if (it == usable.end() || *it != i) {
    if (at == count) {
      at = count - 1;
    } else if (at > 0) {
      const double left = std::abs(front.xi(i) - front.xi(usable[at - 1]));
      const double right = std::abs(front.xi(usable[at]) - front.xi(i));
      if (left <= right) --at;
    }
  }
  const int anchor = usable[at];
  center = front.xi(anchor);

  const auto [first, last] = fit_window_bounds(count, at, fit_window);
  const int width = last - first;
  std::vector<double> xs(width), ys(width), ws(width);
  const bool reversed = anchor < front.axis_index();
  const int kernel_at = std::clamp(at, first + fit_window, std::max(first + fit_window, last - 1 - fit_window));
  for (int k = 0; k < width; ++k) {
    const int slot = reversed ? last - 1 - k : first + k;
    const int j = usable[slot];
    xs[k] = front.xi(j);
    ys[k] = values(j);
    ws[k] = fit_weight<double>(slot - kernel_at, fit_window) * front.flux_const(j);
  }
  return fit_quadratic<double>(xs, ys, center, ws);
}

// ln of the flux-tube part of the amplitude, 0.5 ln(C / width). The remaining
// |p|^(-1/2) factor has no transverse variation in free space or under
// potentials of z alone, and it diverges at turning points, where neighbouring
// rays pass through p = 0 at slightly different instants.
RayValues tube_log_amplitude(const WaveFront& front) {
  const int n = front.size();
  RayValues out(n);
  for (int i = 0; i < n; ++i) {
    const double width = std::max(tube_width(front, i), std::numeric_limits<double>::min());
    out(i) = 0.5 * std::log(std::max(front.flux_const(i), std::numeric_limits<double>::min()) / width);
  }
  return out;
}

std::vector<int> usable_rays(const WaveFront& front, const RayValues& log_r) {
  const double peak = std::exp(log_r.maxCoeff());
  if (!(peak > 0.0) || !std::isfinite(peak)) {
    throw Error(ErrorKind::AmplitudeUnderflow, "no ray carries a positive finite amplitude");
  }
  std::vector<int> usable;
  usable.reserve(front.size());
  for (int i = 0; i < front.size(); ++i) {
    if (std::exp(log_r(i)) >= kAmplitudeFloor * peak) usable.push_back(i);
  }
  if (usable.size() < 3) {
    throw Error(ErrorKind::WindowTooSmall, "fewer than 3 rays above the amplitude floor");
  }
  return usable;
}

}  // namespace

LogAmplitudeDerivatives estimate_log_amplitude_derivatives(const WaveFront& front, int fit_window,
                                                           const RangeRunner& run) {
  const int n = front.size();
  const RayValues log_r = tube_log_amplitude(front);
  const auto usable = usable_rays(front, log_r);

  LogAmplitudeDerivatives d;
  d.first.resize(n);
  d.second.resize(n);
  d.fitted.assign(n, false);
  for (const int u : usable) d.fitted[u] = true;
  run(n, [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      double center = 0.0;
      const auto fit = local_fit(front, log_r, usable, i, fit_window, center);
      d.first(i) = fit.slope(front.xi(i));
      d.second(i) = fit.curvature();
    }
  });
  return d;
}

LaplacianResult laplacian_ratio(const WaveFront& front, const LogAmplitudeDerivatives& derivatives,
                                LaplacianProjection projection, const RayValues* previous) {
  const int n = front.size();
  LaplacianResult out;
  out.values.resize(n);
  out.stalled.assign(n, false);
  for (int i = 0; i < n; ++i) {
    const Vec2d p = front.momentum.col(i);
    const double pm = p.norm();
    const double pz = p(kZ);
    if (pm < kMomentumClamp || std::abs(pz) < kStallRatio * pm) {
      if (!previous || previous->size() != n) {
        throw Error(ErrorKind::LongitudinalStall,
                    "ray " + std::to_string(front.id[i]) + " has |p_z|/|p| below threshold");
      }
      out.values(i) = (*previous)(i);
      out.stalled[i] = true;
      continue;
    }
    double ratio = 1.0;
    if (projection == LaplacianProjection::Transverse) ratio = pm / pz;
    if (projection == LaplacianProjection::StrictPrinted) ratio = p(kX) / pz;
    const double g1 = derivatives.first(i);
    out.values(i) = ratio * ratio * (derivatives.second(i) + g1 * g1);
  }
  return out;
}

double Coupling::potential_per_laplacian() const {
  const double e2 = epsilon * epsilon;
  switch (regime) {
    case Regime::NonRelativistic: return -e2;
    case Regime::Classical: return -0.5 * e2;
    case Regime::Relativistic: return -0.5 * beta2 * e2;
  }
  return 0.0;
}

RayValues wave_potential(const Coupling& coupling, const RayValues& laplacian) {
  if (coupling.eikonal) return RayValues::Zero(laplacian.size());
  return coupling.potential_per_laplacian() * laplacian;
}

void wave_potential_force(const WaveFront& front, const RayValues& potential,
                          const Coupling& coupling, const PotentialField& field, int fit_window,
                          RayValues& drive, RayColumns& force, const RangeRunner& run) {
  const int n = front.size();
  drive = RayValues::Zero(n);
  force = RayColumns::Zero(2, n);
  if (coupling.eikonal) return;

  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  // poles are checked up front so no worker throws
  if (coupling.regime == Regime::Relativistic) {
    for (int i = 0; i < n; ++i) {
      if (!(eval_potential<double>(field, front.position.col(i)) < 1.0)) {
        throw Error(ErrorKind::RelativisticPole, "E - V <= 0 on the front");
      }
    }
  }
  run(n, [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      double center = 0.0;
      const auto fit = local_fit(front, potential, all, i, fit_window, center);
      double gain = 1.0;
      switch (coupling.regime) {
        case Regime::NonRelativistic: gain = 0.5; break;
        case Regime::Classical: gain = 1.0; break;
        case Regime::Relativistic:
          gain = 1.0 / (coupling.beta2 *
                        (1.0 - eval_potential<double>(field, front.position.col(i))));
          break;
      }
      drive(i) = -gain * fit.slope(front.xi(i));
      force.col(i) = drive(i) * front.tangent.col(i);
    }
  });
}

void transport_amplitude(const WaveFront& prev, WaveFront& next, double min_spacing) {
  const int n = next.size();
  if (prev.size() != n || prev.id != next.id) {
    throw Error(ErrorKind::CausticCollapse, "fronts carry different rays");
  }
  if (const auto c = detect_caustic(next, min_spacing, &prev)) {
    throw Error(ErrorKind::CausticCollapse, "rays " + std::to_string(next.id[c->index]) + " and " +
                                                std::to_string(next.id[c->index + 1]) +
                                                " collapsed (spacing " + std::to_string(c->spacing) + ")");
  }
  for (int i = 0; i < n; ++i) {
    double pm = next.momentum.col(i).norm();
    if (pm < kMomentumClamp) {
      pm = kMomentumClamp;
      next.flags[i] |= kFlagMomentumClamped;
    } else {
      next.flags[i] &= ~kFlagMomentumClamped;
    }
    next.amplitude(i) = std::sqrt(next.flux_const(i) / (pm * tube_width(next, i)));
  }
}

std::optional<CausticReport> detect_caustic(const WaveFront& front, double min_spacing,
                                            const WaveFront* previous) {
  const bool compare = previous && previous->size() == front.size();
  for (int i = 0; i + 1 < front.size(); ++i) {
    const double s = front.xi(i + 1) - front.xi(i);
    if (!(s > min_spacing)) return CausticReport{i, s};
    if (compare) {
      // judged across the old front: near a focus the longitudinal offset of
      // neighbours can outweigh their transverse separation
      const Vec2d across = previous->tangent.col(i) + previous->tangent.col(i + 1);
      const Vec2d now = front.position.col(i + 1) - front.position.col(i);
      const Vec2d before = previous->position.col(i + 1) - previous->position.col(i);
      if (!(now.dot(across) > 0.0) && before.dot(across) > 0.0) return CausticReport{i, -s};
    }
  }
  return std::nullopt;
}

double max_flux_deviation(const WaveFront& front) {
  double worst = 0.0;
  for (int i = 0; i < front.size(); ++i) {
    const double pm = std::max(front.momentum.col(i).norm(), kMomentumClamp);
    const double r = front.amplitude(i);
    worst = std::max(worst, std::abs(r * r * pm * tube_width(front, i) / front.flux_const(i) - 1.0));
  }
  return worst;
}

}  // namespace wavetraj
