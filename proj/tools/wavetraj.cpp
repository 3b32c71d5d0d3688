#include <iostream>

#include <CLI11.hpp>

#include "wavetraj/cli.hpp"
#include "wavetraj/errors.hpp"
#include "wavetraj/report.hpp"

int main(int argc, char** argv) {
  using namespace wavetraj;

  CLI::App app{"Wave-Potential ray tracing for Gaussian beams"};
  app.set_version_flag("--version", std::string(version_string()));
  app.require_subcommand(1);

  RunOptions run;
  std::vector<std::string> sets;
  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "run a scenario and write its output files");
  run_cmd->add_option("scenario", run.scenario, "scenario name (see `list`)")->required();
  run_cmd->add_option("--out", run.out_dir, "output directory")->default_str(".");
  run_cmd->add_option("--config", config_path, "key = value settings file");
  run_cmd->add_option("--set", sets, "KEY=VALUE override, repeatable; wins over --config and flags");
  run_cmd->add_flag("--plot", run.plot, "also write trajectories.svg and intensity.svg");
  run_cmd->add_flag("--paper-scale", run.paper_scale, "features at 1e4 w0, lambda0/w0 = 1e-4");
  run_cmd->add_flag("--strict-eq29", run.strict_eq29, "use the printed projection factor (p_x/p_z)^2");
  run_cmd->add_flag("--eikonal", run.eikonal, "drop the Wave Potential");
  run_cmd->add_option("--workers", run.workers, "threads for per-ray work")->check(CLI::PositiveNumber);

  VerifyCommand verify;
  auto* verify_cmd = app.add_subcommand("verify", "run the acceptance checks");
  verify_cmd->add_option("checks", verify.subset, "check names (default: all but the slow ones)");
  verify_cmd->add_flag("--paper-scale", verify.paper_scale, "include the slow paper-scale check");
  verify_cmd->add_flag("--strict-eq29", verify.strict_eq29, "run every check with the printed projection factor");
  verify_cmd->add_option("--workers", verify.workers, "threads for per-ray work")->check(CLI::PositiveNumber);

  auto* list_cmd = app.add_subcommand("list", "list the registered scenarios");

  std::string csv_path;
  std::string svg_path = "plot.svg";
  auto* plot_cmd = app.add_subcommand("plot", "render trajectories.csv as SVG");
  plot_cmd->add_option("csv", csv_path, "trajectories.csv")->required();
  plot_cmd->add_option("svg", svg_path, "output SVG")->default_str("plot.svg");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run_cmd) {
      if (!config_path.empty()) run.config_path = config_path;
      for (const auto& s : sets) run.sets.push_back(parse_set(s));
      return cmd_run(run, std::cout, std::cerr);
    }
    if (*verify_cmd) return cmd_verify(verify, std::cout, std::cerr);
    if (*list_cmd) return cmd_list(std::cout);
    if (*plot_cmd) return cmd_plot(csv_path, svg_path, std::cerr);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
