#include "wavetraj/cli.hpp"

#include <chrono>
#include <ostream>

#include "wavetraj/errors.hpp"
#include "wavetraj/io.hpp"
#include "wavetraj/report.hpp"
#include "wavetraj/verify.hpp"

namespace wavetraj {

namespace {

bool is_usage_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::UnknownScenario:
    case ErrorKind::InvalidOverride:
    case ErrorKind::ConfigParse:
    case ErrorKind::IoFailure:
    case ErrorKind::MalformedCsv:
      return true;
    default:
      return false;
  }
}

// Settings errors found by validation (non-positive values, even ray counts
// and the like) are configuration problems, not simulation failures.
bool is_validation_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonPositiveParameter:
    case ErrorKind::EvenRayCount:
    case ErrorKind::TooFewRays:
    case ErrorKind::FitWindowTooSmall:
    case ErrorKind::RelativisticEnergyBelowRestMass:
      return true;
    default:
      return false;
  }
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::pair<std::string, std::string> parse_set(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw Error(ErrorKind::InvalidOverride, "--set expects KEY=VALUE, got '" + text + "'");
  }
  return {text.substr(0, eq), text.substr(eq + 1)};
}

Overrides collect_overrides(const RunOptions& options) {
  Overrides all;
  if (options.config_path) all = read_config_file(*options.config_path);
  if (options.paper_scale) all.emplace_back("paper_scale", "true");
  if (options.strict_eq29) all.emplace_back("numerics.strict_eq29", "true");
  if (options.eikonal) all.emplace_back("numerics.eikonal_mode", "true");
  all.insert(all.end(), options.sets.begin(), options.sets.end());
  return all;
}

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err) {
  const auto& dir = options.out_dir;
  const auto start = std::chrono::steady_clock::now();

  ScenarioConfig config;
  try {
    config = build_scenario(options.scenario, collect_overrides(options));
    validate_scenario(config);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    // an unusable output directory leaves nothing to report into
    if (e.kind() != ErrorKind::IoFailure) {
      try {
        write_file_atomic(dir / "summary.json",
                          dump(summary_json(options.scenario, nullptr, {}, SimulationFailure{e.kind(), e.what()})));
      } catch (const Error&) {
      }
    }
    return kExitUsage;
  }

  const ScenarioRun run = run_scenario(config, options.workers);
  const auto metrics = beam_metrics(run.log);
  const auto oracles = evaluate_oracles(config, run.log, metrics);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  try {
    std::vector<std::pair<std::string, std::string>> files = {
        {"trajectories.csv", trajectories_csv(run.log)},
        {"metrics.csv", metrics_csv(metrics)},
        {"summary.json", dump(summary_json(config.name, &run, oracles, run.log.error))},
        {"config.txt", format_config(config.settings)},
    };
    if (options.plot) {
      const auto rows = parse_trajectories_csv(files.front().second);
      files.emplace_back("trajectories.svg", trajectories_svg(rows));
      files.emplace_back("intensity.svg", intensity_svg(rows));
    }
    std::vector<OutputFile> inventory;
    for (const auto& [name, content] : files) {
      write_file_atomic(dir / name, content);
      inventory.push_back({name, sha256_hex(content), content.size()});
    }
    write_file_atomic(dir / "manifest.json", dump(manifest_json(run, seconds, options.workers, inventory)));
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  out << config.name << ": " << to_string(run.log.termination) << " after " << run.log.steps << " steps";
  if (!metrics.empty()) out << ", z_axis " << metrics.back().z_axis;
  out << "\n";
  for (const auto& e : run.log.events) {
    out << "  event " << to_string(e.kind) << " at t=" << e.t << " z=" << e.z << "\n";
  }
  for (const auto& o : oracles) {
    out << "  " << o.name << ": measured " << o.measured << ", expected " << o.expected << ", rel err " << o.rel_err
        << "\n";
  }
  if (run.log.error) {
    err << "simulation error: " << run.log.error->message << "\n";
    return is_validation_error(run.log.error->kind) ? kExitUsage : kExitSimulation;
  }
  out << "wrote " << dir.string() << "\n";
  return kExitOk;
}

int cmd_verify(const VerifyCommand& command, std::ostream& out, std::ostream& err) {
  VerifyOptions options;
  options.subset = command.subset;
  options.include_slow = command.paper_scale;
  options.strict_eq29 = command.strict_eq29;
  options.workers = command.workers;
  std::vector<CheckResult> results;
  try {
    results = run_checks(options, [&](const CheckResult& r) { out << format_check(r) << std::endl; });
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  int failed = 0;
  for (const auto& r : results) failed += r.passed ? 0 : 1;
  out << results.size() - failed << "/" << results.size() << " checks passed\n";
  return failed == 0 ? kExitOk : kExitVerification;
}

int cmd_list(std::ostream& out) {
  for (const auto& s : scenario_registry()) out << s.name << "  " << s.description << "\n";
  return kExitOk;
}

int cmd_plot(const std::filesystem::path& csv, const std::filesystem::path& svg, std::ostream& err) {
  try {
    const auto rows = parse_trajectories_csv(read_text_file(csv));
    write_file_atomic(svg, combined_svg(rows));
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return is_usage_error(e.kind()) ? kExitUsage : kExitSimulation;
  }
  return kExitOk;
}

}  // namespace wavetraj
