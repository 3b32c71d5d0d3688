#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "wavetraj/cli.hpp"
#include "wavetraj/errors.hpp"
#include "wavetraj/io.hpp"
#include "wavetraj/report.hpp"
#include "wavetraj/verify.hpp"

using namespace wavetraj;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("wavetraj_test_" + name);
  fs::remove_all(dir);
  return dir;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::NonFinite;
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("config text") {
    const auto o = parse_config_text("# comment\n\nfront.n_rays = 101  # trailing\n  E_over_V0=0.5\n");
    REQUIRE(o.size() == 2);
    CHECK(o[0] == std::pair<std::string, std::string>{"front.n_rays", "101"});
    CHECK(o[1] == std::pair<std::string, std::string>{"E_over_V0", "0.5"});
    CHECK(kind_of([] { parse_config_text("a = 1\nbroken line\n"); }) == ErrorKind::ConfigParse);
    CHECK(kind_of([] { parse_config_text(" = 3\n"); }) == ErrorKind::ConfigParse);
    try {
      parse_config_text("a = 1\nb\n", "x.cfg");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("x.cfg:2") != std::string::npos);
    }
    const std::map<std::string, std::string> settings = {{"a", "1"}, {"b.c", "none"}};
    const auto back = parse_config_text(format_config(settings));
    CHECK(back.size() == 2);
  }

  TEST_CASE("CSV numbers carry nine significant digits") {
    CHECK(format_csv_number(0.0) == "0.00000000e+00");
    CHECK(format_csv_number(1.0) == "1.00000000e+00");
    CHECK(format_csv_number(-0.1234567891) == "-1.23456789e-01");
    CHECK(format_csv_number(6.02214076e23) == "6.02214076e+23");
  }

  TEST_CASE("trajectory CSV round trip and malformed input") {
    auto config = build_scenario("free_gaussian", {{"numerics.t_end", "1"}, {"front.n_rays", "21"}});
    const auto run = run_scenario(config);
    const auto text = trajectories_csv(run.log);
    CHECK(text.rfind(std::string(kTrajectoryHeader) + "\n", 0) == 0);
    const auto rows = parse_trajectories_csv(text);
    CHECK(rows.size() == 21 * run.log.samples.size());
    CHECK(rows[10].x == 0.0);
    CHECK(rows[10].R == 1.0);

    CHECK(kind_of([] { parse_trajectories_csv("t,x\n1,2\n"); }) == ErrorKind::MalformedCsv);
    CHECK(kind_of([&] { parse_trajectories_csv(std::string(kTrajectoryHeader) + "\n1,2,3\n"); }) ==
          ErrorKind::MalformedCsv);
    CHECK(kind_of([&] { parse_trajectories_csv(std::string(kTrajectoryHeader) + "\n1,0,a,0,0,0,0,0,0,0\n"); }) ==
          ErrorKind::MalformedCsv);
  }

  TEST_CASE("SHA-256 of a known message") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  }

  TEST_CASE("atomic write replaces the file and leaves no temporary") {
    const auto dir = scratch("atomic");
    write_file_atomic(dir / "f.txt", "one");
    write_file_atomic(dir / "f.txt", "two");
    CHECK(read_text_file(dir / "f.txt") == "two");
    CHECK_FALSE(fs::exists(dir / "f.txt.tmp"));
    CHECK(kind_of([&] { read_text_file(dir / "missing"); }) == ErrorKind::IoFailure);
  }

  TEST_CASE("plot of a zero-step run") {
    const auto run = run_scenario(build_scenario("free_gaussian", {{"numerics.t_end", "0"}}));
    const auto rows = parse_trajectories_csv(trajectories_csv(run.log));
    const auto svg = combined_svg(rows);
    CHECK(svg.find("class=\"initial\"") != std::string::npos);
    CHECK(svg.find("class=\"final\"") == std::string::npos);
    CHECK(svg.find("stroke-dasharray") != std::string::npos);  // the launch front line
  }
}

TEST_SUITE("cli") {
  TEST_CASE("run writes the five output files") {
    const auto dir = scratch("run");
    RunOptions o;
    o.scenario = "free_gaussian";
    o.out_dir = dir;
    o.sets = {{"numerics.z_end", "20"}};
    std::ostringstream out, err;
    CHECK(cmd_run(o, out, err) == kExitOk);
    for (const char* f : {"trajectories.csv", "metrics.csv", "summary.json", "manifest.json", "config.txt"}) {
      CHECK(fs::exists(dir / f));
    }
    const auto summary = nlohmann::json::parse(read_text_file(dir / "summary.json"));
    for (const char* key : {"scenario", "epsilon", "n_rays", "dt", "termination", "events", "oracle_comparisons",
                            "max_h_drift", "max_flux_deviation"}) {
      CHECK(summary.contains(key));
    }
    const auto manifest = nlohmann::json::parse(read_text_file(dir / "manifest.json"));
    const auto csv = read_text_file(dir / "trajectories.csv");
    bool listed = false;
    for (const auto& f : manifest["outputs"]) {
      if (f["file"] == "trajectories.csv") listed = f["sha256"] == sha256_hex(csv);
    }
    CHECK(listed);
  }

  TEST_CASE("the echoed config reproduces the run byte for byte") {
    const auto first = scratch("repro_a");
    const auto second = scratch("repro_b");
    RunOptions o;
    o.scenario = "twin_gaussian";
    o.out_dir = first;
    o.sets = {{"numerics.z_end", "15"}, {"front.n_rays", "101"}};
    std::ostringstream out, err;
    REQUIRE(cmd_run(o, out, err) == kExitOk);
    RunOptions again;
    again.scenario = "twin_gaussian";
    again.out_dir = second;
    again.config_path = first / "config.txt";
    again.workers = 4;
    REQUIRE(cmd_run(again, out, err) == kExitOk);
    CHECK(read_text_file(first / "trajectories.csv") == read_text_file(second / "trajectories.csv"));
    CHECK(read_text_file(first / "summary.json") == read_text_file(second / "summary.json"));
  }

  TEST_CASE("barrier run reports the turning event against its oracle") {
    const auto dir = scratch("barrier");
    RunOptions o;
    o.scenario = "barrier";
    o.out_dir = dir;
    o.sets = {{"E_over_V0", "0.5"}};
    std::ostringstream out, err;
    CHECK(cmd_run(o, out, err) == kExitOk);
    const auto summary = nlohmann::json::parse(read_text_file(dir / "summary.json"));
    bool turning = false;
    for (const auto& e : summary["events"]) turning |= e["kind"] == "turning";
    CHECK(turning);
    bool compared = false;
    for (const auto& c : summary["oracle_comparisons"]) {
      if (c["name"] == "turning_z") compared = c["rel_err"].get<double>() <= 0.01;
    }
    CHECK(compared);
  }

  TEST_CASE("exit codes") {
    std::ostringstream out, err;
    RunOptions unknown;
    unknown.scenario = "nosuch";
    unknown.out_dir = scratch("unknown");
    CHECK(cmd_run(unknown, out, err) == kExitUsage);
    const auto summary = nlohmann::json::parse(read_text_file(unknown.out_dir / "summary.json"));
    CHECK(summary["error"]["kind"] == "UnknownScenario");

    RunOptions bad_file;
    bad_file.scenario = "free_gaussian";
    bad_file.out_dir = scratch("badfile");
    bad_file.config_path = "/nonexistent/config.txt";
    CHECK(cmd_run(bad_file, out, err) == kExitUsage);

    RunOptions even;
    even.scenario = "free_gaussian";
    even.out_dir = scratch("even");
    even.sets = {{"front.n_rays", "200"}};
    CHECK(cmd_run(even, out, err) == kExitUsage);

    // the eikonal lens runs into its focus
    RunOptions caustic;
    caustic.scenario = "lens";
    caustic.eikonal = true;
    caustic.out_dir = scratch("caustic");
    CHECK(cmd_run(caustic, out, err) == kExitSimulation);
    const auto s = nlohmann::json::parse(read_text_file(caustic.out_dir / "summary.json"));
    CHECK(s["error"]["kind"] == "CausticCollapse");
    CHECK(fs::exists(caustic.out_dir / "trajectories.csv"));

    CHECK(kind_of([] { parse_set("novalue"); }) == ErrorKind::InvalidOverride);
    CHECK(parse_set("a.b=1=2").second == "1=2");
  }

  TEST_CASE("flags sit between the config file and --set") {
    const auto dir = scratch("precedence");
    write_file_atomic(dir / "c.txt", "numerics.eikonal_mode = false\nfront.n_rays = 51\n");
    RunOptions o;
    o.config_path = dir / "c.txt";
    o.eikonal = true;
    o.sets = {{"front.n_rays", "61"}};
    const auto all = collect_overrides(o);
    const auto config = build_scenario("free_gaussian", all);
    CHECK(config.numerics.eikonal_mode);
    CHECK(config.numerics.n_rays == 61);
  }

  TEST_CASE("list and plot") {
    std::ostringstream out, err;
    CHECK(cmd_list(out) == kExitOk);
    for (const auto& s : scenario_registry()) CHECK(out.str().find(s.name) != std::string::npos);

    const auto dir = scratch("plot");
    RunOptions o;
    o.scenario = "free_gaussian";
    o.out_dir = dir;
    o.plot = true;
    o.sets = {{"numerics.z_end", "30"}};
    REQUIRE(cmd_run(o, out, err) == kExitOk);
    CHECK(fs::exists(dir / "trajectories.svg"));
    CHECK(fs::exists(dir / "intensity.svg"));
    CHECK(cmd_plot(dir / "trajectories.csv", dir / "both.svg", err) == kExitOk);
    const auto svg = read_text_file(dir / "both.svg");
    std::size_t heavy = 0;
    for (auto pos = svg.find("class=\"envelope\""); pos != std::string::npos; pos = svg.find("class=\"envelope\"", pos + 1)) {
      ++heavy;
    }
    CHECK(heavy == 2);
    CHECK(svg.find("class=\"initial\"") != std::string::npos);
    CHECK(svg.find("class=\"final\"") != std::string::npos);

    write_file_atomic(dir / "bad.csv", "nonsense\n");
    CHECK(cmd_plot(dir / "bad.csv", dir / "bad.svg", err) == kExitUsage);
    CHECK(cmd_plot(dir / "missing.csv", dir / "m.svg", err) == kExitUsage);
  }

  TEST_CASE("verify: named subsets and the printed projection") {
    std::ostringstream out, err;
    VerifyCommand only;
    only.subset = {"constant_force"};
    CHECK(cmd_verify(only, out, err) == kExitOk);
    CHECK(out.str().find("constant_force") != std::string::npos);
    CHECK(out.str().find("envelope") == std::string::npos);

    VerifyCommand strict;
    strict.subset = {"envelope"};
    strict.strict_eq29 = true;
    CHECK(cmd_verify(strict, out, err) == kExitVerification);

    VerifyCommand unknown;
    unknown.subset = {"nosuch"};
    CHECK(cmd_verify(unknown, out, err) == kExitUsage);

    CHECK(check_registry().size() == 11);
  }
}
