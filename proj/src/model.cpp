#include "wavetraj/model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace wavetraj {

namespace {

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

double launch_momentum(const RegimeConfig& r) {
  switch (r.regime) {
    case Regime::NonRelativistic:
      return std::sqrt(2.0 * r.mass * r.total_energy);
    case Regime::Relativistic: {
      // p0^2 = (E/c)^2 - (m0 c)^2
      const double e_over_c = r.total_energy / r.light_speed;
      const double rest = r.mass * r.light_speed;
      return std::sqrt((e_over_c - rest) * (e_over_c + rest));
    }
    case Regime::Classical:
      return r.hbar * r.angular_frequency / r.light_speed;
  }
  return 0.0;
}

double launch_wavelength(const RegimeConfig& r, double p0) {
  if (r.regime == Regime::Classical) {
    return 2.0 * std::numbers::pi * r.light_speed / r.angular_frequency;
  }
  return 2.0 * std::numbers::pi * r.hbar / p0;
}

}  // namespace

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::Classical: return "classical";
    case Regime::NonRelativistic: return "nonrelativistic";
    case Regime::Relativistic: return "relativistic";
  }
  return "unknown";
}

std::optional<Regime> parse_regime(std::string_view name) {
  if (name == "classical") return Regime::Classical;
  if (name == "nonrelativistic" || name == "nr") return Regime::NonRelativistic;
  if (name == "relativistic" || name == "rel") return Regime::Relativistic;
  return std::nullopt;
}

double UnitSystem::unit(Dimension d) const {
  switch (d) {
    case Dimension::Length: return length;
    case Dimension::Momentum: return momentum;
    case Dimension::Time: return time;
    case Dimension::Energy: return energy;
  }
  return 1.0;
}

std::string Validation::message() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < issues.size(); ++i) {
    if (i) out << "; ";
    out << to_string(issues[i].kind) << ": " << issues[i].detail;
  }
  return out.str();
}

DerivedScales derive_scales(const RegimeConfig& regime) {
  DerivedScales s;
  s.epsilon = regime.wavelength_ratio / (2.0 * std::numbers::pi);
  s.p0 = launch_momentum(regime);
  s.rayleigh_length = std::numbers::pi / regime.wavelength_ratio;
  if (regime.regime == Regime::Relativistic) {
    const double cp = regime.light_speed * s.p0 / regime.total_energy;
    s.beta2 = cp * cp;
    s.rest_ratio = regime.mass * regime.light_speed * regime.light_speed / regime.total_energy;
  }
  return s;
}

UnitSystem make_unit_system(const RegimeConfig& regime, const DerivedScales& scales) {
  UnitSystem u;
  u.length = launch_wavelength(regime, scales.p0) / regime.wavelength_ratio;
  u.momentum = scales.p0;
  switch (regime.regime) {
    case Regime::NonRelativistic:
      u.time = u.length * regime.mass / scales.p0;
      u.energy = regime.total_energy;
      break;
    case Regime::Relativistic:
      u.time = u.length * regime.total_energy /
               (regime.light_speed * regime.light_speed * scales.p0);
      u.energy = regime.total_energy;
      break;
    case Regime::Classical:
      u.time = u.length / regime.light_speed;
      u.energy = regime.hbar * regime.angular_frequency;
      break;
  }
  return u;
}

Validation validate_config(const RegimeConfig& regime, const NumericsConfig& numerics) {
  Validation v;
  auto issue = [&](ErrorKind kind, std::string detail) {
    v.issues.push_back({kind, std::move(detail)});
  };
  auto need_positive = [&](double value, const char* name) {
    if (!positive(value)) issue(ErrorKind::NonPositiveParameter, std::string(name) + " must be > 0");
  };

  need_positive(regime.wavelength_ratio, "wavelength_ratio");
  need_positive(regime.hbar, "hbar");
  switch (regime.regime) {
    case Regime::NonRelativistic:
      need_positive(regime.mass, "mass");
      need_positive(regime.total_energy, "total_energy");
      break;
    case Regime::Relativistic:
      need_positive(regime.light_speed, "light_speed");
      need_positive(regime.total_energy, "total_energy");
      if (!(std::isfinite(regime.mass) && regime.mass >= 0.0)) {
        issue(ErrorKind::NonPositiveParameter, "rest mass must be >= 0");
      } else if (positive(regime.light_speed) && positive(regime.total_energy)) {
        const double rest = regime.mass * regime.light_speed * regime.light_speed;
        if (regime.total_energy <= rest * (1.0 + 1e-12)) {
          issue(ErrorKind::RelativisticEnergyBelowRestMass,
                "total_energy must exceed m0 c^2 for a real launch momentum");
        }
      }
      break;
    case Regime::Classical:
      need_positive(regime.light_speed, "light_speed");
      need_positive(regime.angular_frequency, "angular_frequency");
      break;
  }

  if (numerics.n_rays < 5) {
    issue(ErrorKind::TooFewRays, "n_rays must be >= 5");
  } else if (numerics.n_rays % 2 == 0) {
    issue(ErrorKind::EvenRayCount, "n_rays must be odd so one ray runs on the axis");
  }
  if (numerics.fit_window < 2) issue(ErrorKind::FitWindowTooSmall, "fit_window must be >= 2");
  need_positive(numerics.dt, "dt");
  need_positive(numerics.front_half_width, "front_half_width");
  need_positive(numerics.caustic_min_spacing, "caustic_min_spacing");
  if (numerics.record_stride < 1) issue(ErrorKind::NonPositiveParameter, "record_stride must be >= 1");
  if (numerics.max_steps < 1) issue(ErrorKind::NonPositiveParameter, "max_steps must be >= 1");
  if (numerics.t_end && !(std::isfinite(*numerics.t_end) && *numerics.t_end >= 0.0)) {
    issue(ErrorKind::NonPositiveParameter, "t_end must be >= 0");
  }
  if (numerics.z_end && !std::isfinite(*numerics.z_end)) {
    issue(ErrorKind::NonPositiveParameter, "z_end must be finite");
  }

  if (!v.issues.empty()) return v;

  ValidatedConfig cfg{regime, numerics, derive_scales(regime), {}};
  cfg.units = make_unit_system(regime, cfg.scales);
  // epsilon must also read hbar / (p0 w0) once the waist is fixed
  const double hbar_eps = regime.regime == Regime::Classical
                              ? regime.light_speed / (regime.angular_frequency * cfg.units.length)
                              : regime.hbar / (cfg.scales.p0 * cfg.units.length);
  if (!(std::abs(hbar_eps - cfg.scales.epsilon) <= 1e-12 * cfg.scales.epsilon)) {
    v.issues.push_back({ErrorKind::NonPositiveParameter, "inconsistent derived epsilon"});
    return v;
  }
  v.config = std::move(cfg);
  return v;
}

}  // namespace wavetraj
