#include "wavetraj/report.hpp"

#include <algorithm>
#include <cmath>

#ifndef WAVETRAJ_VERSION
#define WAVETRAJ_VERSION "0.0.0"
#endif

namespace wavetraj {

std::string_view version_string() { return WAVETRAJ_VERSION; }

std::optional<double> first_turning_z(const TrajectoryLog& log) {
  for (const auto& e : log.events) {
    if (e.kind == EventKind::Turning) return e.z;
  }
  return std::nullopt;
}

std::optional<HarmonicMeasurement> measure_harmonic(const std::vector<BeamMetrics>& metrics) {
  if (metrics.size() < 3) return std::nullopt;
  HarmonicMeasurement h;
  std::vector<double> crossings;
  for (std::size_t k = 0; k < metrics.size(); ++k) {
    h.amplitude = std::max(h.amplitude, std::abs(metrics[k].z_axis));
    if (k == 0) continue;
    const auto& a = metrics[k - 1];
    const auto& b = metrics[k];
    if ((a.axial_pz > 0.0 && b.axial_pz <= 0.0) || (a.axial_pz < 0.0 && b.axial_pz >= 0.0)) {
      const double s = a.axial_pz / (a.axial_pz - b.axial_pz);
      crossings.push_back(a.t + s * (b.t - a.t));
    }
  }
  h.crossings = static_cast<int>(crossings.size());
  if (h.crossings < 2) return std::nullopt;
  h.period = 2.0 * (crossings.back() - crossings.front()) / (h.crossings - 1);
  h.rms_start = metrics.front().rms_width;
  h.rms_end = metrics.back().rms_width;
  return h;
}

namespace {

OracleResult relative(std::string name, double measured, double expected, double at_z) {
  return {std::move(name), measured, expected, std::abs(measured - expected) / std::abs(expected), at_z};
}

}  // namespace

std::vector<OracleResult> evaluate_oracles(const ScenarioConfig& config, const TrajectoryLog& log,
                                           const std::vector<BeamMetrics>& metrics) {
  std::vector<OracleResult> out;
  const auto& o = config.oracles;
  if (o.envelope && metrics.size() > 5) {
    const auto c = compare_envelope(metrics, config.regime.wavelength_ratio);
    const auto it = std::find_if(metrics.begin(), metrics.end(),
                                 [&](const BeamMetrics& m) { return m.z_axis == c.at_z; });
    const double measured = it != metrics.end() ? std::max(it->envelope_plus, -it->envelope_minus) : 0.0;
    out.push_back({"envelope", measured, analytic_waist(c.at_z, config.regime.wavelength_ratio), c.max_rel_err,
                   c.at_z});
  }
  if (o.turning_z) {
    if (const auto z = first_turning_z(log)) out.push_back(relative("turning_z", *z, *o.turning_z, *z));
  }
  if (o.asymptotic_pz && !metrics.empty() && log.ok()) {
    const auto& last = metrics.back();
    out.push_back(relative("asymptotic_pz", last.axial_pz, *o.asymptotic_pz, last.z_axis));
  }
  if (o.harmonic) {
    if (const auto h = measure_harmonic(metrics)) {
      out.push_back(relative("harmonic_amplitude", h->amplitude, o.harmonic->amplitude, 0.0));
      out.push_back(relative("harmonic_period", h->period, o.harmonic->period, 0.0));
    }
  }
  return out;
}

nlohmann::json events_json(const std::vector<Event>& events) {
  auto arr = nlohmann::json::array();
  for (const auto& e : events) {
    arr.push_back({{"kind", to_string(e.kind)}, {"step", e.step}, {"t", e.t}, {"z", e.z}, {"detail", e.detail}});
  }
  return arr;
}

nlohmann::json summary_json(std::string_view scenario, const ScenarioRun* run,
                            const std::vector<OracleResult>& oracles,
                            const std::optional<SimulationFailure>& error) {
  nlohmann::json j;
  j["scenario"] = scenario;
  j["epsilon"] = nullptr;
  j["n_rays"] = nullptr;
  j["dt"] = nullptr;
  j["termination"] = "error";
  j["steps"] = 0;
  j["events"] = nlohmann::json::array();
  j["max_h_drift"] = nullptr;
  j["max_flux_deviation"] = nullptr;
  j["max_pmag_drift"] = nullptr;
  if (run) {
    const auto& log = run->log;
    j["epsilon"] = run->validated.scales.epsilon;
    j["n_rays"] = run->validated.numerics.n_rays;
    j["dt"] = log.dt;
    j["termination"] = to_string(log.termination);
    j["steps"] = log.steps;
    j["events"] = events_json(log.events);
    j["max_h_drift"] = log.max_h_drift;
    j["max_flux_deviation"] = log.max_flux_deviation;
    j["max_pmag_drift"] = std::holds_alternative<Free>(run->config.potential) ? nlohmann::json(log.max_pmag_drift) : nullptr;
    j["stalled_rays_max"] = log.max_stalled;
  }
  auto cmp = nlohmann::json::array();
  for (const auto& o : oracles) {
    cmp.push_back({{"name", o.name},
                   {"measured", o.measured},
                   {"expected", o.expected},
                   {"rel_err", o.rel_err},
                   {"at_z", o.at_z}});
  }
  j["oracle_comparisons"] = cmp;
  j["error"] = error ? nlohmann::json{{"kind", to_string(error->kind)}, {"message", error->message}}
                     : nlohmann::json(nullptr);
  return j;
}

nlohmann::json manifest_json(const ScenarioRun& run, double wall_seconds, int workers,
                             const std::vector<OutputFile>& outputs) {
  nlohmann::json j;
  j["scenario"] = run.config.name;
  j["version"] = version_string();
  j["settings"] = run.config.settings;
  j["workers"] = workers;
  j["wall_seconds"] = wall_seconds;
  j["events"] = events_json(run.log.events);
  // one internal unit expressed in the regime's own base units
  const auto& u = run.validated.units;
  j["units"] = {
      {"length", {{"name", "w0"}, {"value", u.length}}},
      {"momentum", {{"name", "p0"}, {"value", u.momentum}}},
      {"time", {{"name", "t_unit"}, {"value", u.time}}},
      {"energy", {{"name", "E"}, {"value", u.energy}}},
      {"regime", to_string(run.config.regime.regime)},
  };
  j["reproduce"] = "wavetraj run " + run.config.name + " --config config.txt";
  auto files = nlohmann::json::array();
  for (const auto& f : outputs) files.push_back({{"file", f.name}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  j["outputs"] = files;
  return j;
}

}  // namespace wavetraj
