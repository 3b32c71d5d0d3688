#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wavetraj/dynamics.hpp"
#include "wavetraj/model.hpp"
#include "wavetraj/potentials.hpp"
#include "wavetraj/wavefront.hpp"

namespace wavetraj {

/// Ordered key = value overrides; later entries win.
using Overrides = std::vector<std::pair<std::string, std::string>>;

struct ScenarioInfo {
  std::string name;
  std::string description;
};

/// The registered experiments, in listing order.
const std::vector<ScenarioInfo>& scenario_registry();

struct HarmonicOracle {
  double energy = 0.0;     // E_n = (n + 1/2) hbar omega
  double amplitude = 0.0;  // sqrt(2 E_n / (m omega^2))
  double period = 0.0;     // 2 pi / omega
};

HarmonicOracle harmonic_oracle(int n, double hbar = 1.0, double mass = 1.0, double omega = 1.0);

/// Paraxial Gaussian waist law: x / w0 = sqrt(1 + (lambda0 z / (pi w0^2))^2),
/// with z in units of w0.
double analytic_waist(double z, double wavelength_ratio);

/// Analytic expectations attached to a scenario, all in internal units.
struct OracleBindings {
  bool envelope = false;
  std::optional<double> turning_z;
  std::optional<double> asymptotic_pz;
  std::optional<HarmonicOracle> harmonic;
};

struct ScenarioConfig {
  std::string name;
  RegimeConfig regime;
  PotentialField potential = Free{};
  RefractiveIndexField index = UniformIndex{};
  std::vector<GaussianComponent> components;
  Vec2d launch_momentum = Vec2d(0.0, 1.0);
  NumericsConfig numerics;
  OracleBindings oracles;
  bool paper_scale = false;
  /// Every setting with defaults materialized, as written to manifest.json.
  std::map<std::string, std::string> settings;
};

/// Builds a registered scenario and applies `overrides` on top of its
/// defaults. Throws UnknownScenario or InvalidOverride.
ScenarioConfig build_scenario(std::string_view name, const Overrides& overrides = {});

struct ScenarioRun {
  ScenarioConfig config;
  ValidatedConfig validated;
  TrajectoryLog log;
};

ValidatedConfig validate_scenario(const ScenarioConfig& config);
WaveFront launch_front(const ScenarioConfig& config);
ScenarioRun run_scenario(const ScenarioConfig& config, int workers = 1);

struct BeamMetrics {
  double t = 0.0;
  double z_axis = 0.0;
  double envelope_plus = 0.0;
  double envelope_minus = 0.0;
  double rms_width = 0.0;
  double peak_intensity = 0.0;
  double axial_pz = 0.0;
  double axial_x = 0.0;
};

/// One entry per recorded sample. The envelope follows the rays launched at
/// x = +-1 (interpolated in launch position between the two nearest rays when
/// no ray starts exactly there); the other figures skip the kEdgeRays
/// outermost rays on each side.
std::vector<BeamMetrics> beam_metrics(const TrajectoryLog& log);

struct OracleComparison {
  double max_rel_err = 0.0;
  double at_z = 0.0;
};

/// max |metric - oracle| / |oracle| over the samples after the first `skip`.
OracleComparison compare_to_oracle(const std::vector<BeamMetrics>& metrics,
                                   const std::function<double(const BeamMetrics&)>& metric,
                                   const std::function<double(double z)>& oracle, int skip = 5);

/// Envelope (both sides) against the waist law.
OracleComparison compare_envelope(const std::vector<BeamMetrics>& metrics, double wavelength_ratio,
                                  int skip = 5);

}  // namespace wavetraj
