#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "wavetraj/dynamics.hpp"
#include "wavetraj/scenarios.hpp"

namespace wavetraj {

/// A measured figure against its analytic value.
struct OracleResult {
  std::string name;
  double measured = 0.0;
  double expected = 0.0;
  double rel_err = 0.0;
  double at_z = 0.0;
};

/// z of the axis ray at the first turning event.
std::optional<double> first_turning_z(const TrajectoryLog& log);

struct HarmonicMeasurement {
  double amplitude = 0.0;  // max |z| of the axis ray
  double period = 0.0;     // twice the mean spacing of axial p_z zero crossings
  int crossings = 0;
  double rms_start = 0.0;
  double rms_end = 0.0;
};

/// Needs at least two p_z zero crossings in the recorded samples.
std::optional<HarmonicMeasurement> measure_harmonic(const std::vector<BeamMetrics>& metrics);

/// Every oracle bound to the scenario that the run got far enough to test.
std::vector<OracleResult> evaluate_oracles(const ScenarioConfig& config, const TrajectoryLog& log,
                                           const std::vector<BeamMetrics>& metrics);

nlohmann::json events_json(const std::vector<Event>& events);

/// summary.json. `run` is null when the run never started (bad settings);
/// the fields that need it are then null. Contains no timing, so equal
/// inputs give equal bytes.
nlohmann::json summary_json(std::string_view scenario, const ScenarioRun* run,
                            const std::vector<OracleResult>& oracles,
                            const std::optional<SimulationFailure>& error);

struct OutputFile {
  std::string name;
  std::string sha256;
  std::size_t bytes = 0;
};

nlohmann::json manifest_json(const ScenarioRun& run, double wall_seconds, int workers,
                             const std::vector<OutputFile>& outputs);

std::string_view version_string();

}  // namespace wavetraj
