#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wavetraj/errors.hpp"

namespace wavetraj {

enum class Regime { Classical, NonRelativistic, Relativistic };

std::string_view to_string(Regime regime);
std::optional<Regime> parse_regime(std::string_view name);

/// Physical constants of the active wave system, in user units.
///
/// `mass` is m for the non-relativistic system and the rest mass m0 for the
/// relativistic one (zero selects massless particles). `light_speed` is used by
/// the relativistic and classical systems, `total_energy` by the two matter-wave
/// systems and `angular_frequency` by the classical one. The beam waist is not
/// given directly: it follows from the launch wavelength and `wavelength_ratio`
/// (lambda0 / w0).
struct RegimeConfig {
  Regime regime = Regime::NonRelativistic;
  double hbar = 1.0;
  double mass = 1.0;
  double light_speed = 1.0;
  double total_energy = 1.0;
  double angular_frequency = 1.0;
  double wavelength_ratio = 1e-2;
};

/// How the fitted d^2 lnR / dxi^2 + (d lnR / dxi)^2 along the front is turned
/// into grad^2 R / R.
enum class LaplacianProjection {
  /// factor 1: xi is already arclength across the rays
  Arclength,
  /// factor (|p| / p_z)^2, for derivatives taken along x instead of xi
  Transverse,
  /// factor (p_x / p_z)^2, as printed; vanishes for a planar front
  StrictPrinted,
};

struct NumericsConfig {
  int n_rays = 201;
  double front_half_width = 3.0;  // in w0
  double dt = 0.05;
  std::optional<double> t_end;
  std::optional<double> z_end;
  bool stop_at_turning = false;
  int fit_window = 8;
  int record_stride = 25;
  bool strict_paper_eq29 = false;  // overrides `projection` with StrictPrinted
  LaplacianProjection projection = LaplacianProjection::Arclength;
  bool eikonal_mode = false;
  double caustic_min_spacing = 1e-8;
  long max_steps = 20'000'000;
};

/// Scales derived from a RegimeConfig.
///
/// `epsilon` = lambda0 / (2 pi w0) is the only dimensionless knob of the
/// internal equations. `p0` is the launch momentum in user units (hbar k0 for
/// the classical system). `rayleigh_length` is in units of w0.
/// `beta2` = (c p0 / E)^2 and `rest_ratio` = m0 c^2 / E are only meaningful for
/// the relativistic system; they are 1 and 0 otherwise.
struct DerivedScales {
  double epsilon = 0.0;
  double p0 = 0.0;
  double rayleigh_length = 0.0;
  double beta2 = 1.0;
  double rest_ratio = 0.0;
};

enum class Dimension { Length, Momentum, Time, Energy };

/// Internal units: lengths in w0, momenta in p0 (wave vectors in k0), time in
/// w0 / (launch speed), energies in E (hbar omega for classical waves).
struct UnitSystem {
  double length = 1.0;
  double momentum = 1.0;
  double time = 1.0;
  double energy = 1.0;

  double unit(Dimension d) const;
  double to_internal(double value, Dimension d) const { return value / unit(d); }
  double from_internal(double value, Dimension d) const { return value * unit(d); }
};

struct ConfigIssue {
  ErrorKind kind;
  std::string detail;
};

struct ValidatedConfig {
  RegimeConfig regime;
  NumericsConfig numerics;
  DerivedScales scales;
  UnitSystem units;
};

struct Validation {
  std::optional<ValidatedConfig> config;
  std::vector<ConfigIssue> issues;

  bool ok() const { return config.has_value(); }
  std::string message() const;
};

/// Collects every violation before answering; a config is either returned
/// complete with derived scales, or not at all.
Validation validate_config(const RegimeConfig& regime, const NumericsConfig& numerics);

DerivedScales derive_scales(const RegimeConfig& regime);
UnitSystem make_unit_system(const RegimeConfig& regime, const DerivedScales& scales);

}  // namespace wavetraj
