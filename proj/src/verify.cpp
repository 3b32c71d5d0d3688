#include "wavetraj/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <map>
#include <memory>
#include <limits>
#include <numbers>

#include "wavetraj/errors.hpp"
#include "wavetraj/io.hpp"
#include "wavetraj/report.hpp"
#include "wavetraj/scenarios.hpp"

namespace wavetraj {

namespace {

using Clock = std::chrono::steady_clock;

std::string format(const char* fmt, ...) {
  char buf[1024];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  return buf;
}

struct CachedRun {
  ScenarioRun run;
  std::vector<BeamMetrics> metrics;
  double seconds = 0.0;

  const TrajectoryLog& log() const { return run.log; }
};

// Every scenario run of a verify session goes through here, so checks that
// share a run (the envelope run feeds the invariant and cross-regime checks)
// only pay for it once.
class Session {
 public:
  explicit Session(const VerifyOptions& options) : options_(options) {
    if (options.strict_eq29) base_.emplace_back("numerics.strict_eq29", "true");
  }

  ScenarioConfig config(const std::string& name, const Overrides& extra = {}) const {
    Overrides all = base_;
    all.insert(all.end(), extra.begin(), extra.end());
    return build_scenario(name, all);
  }

  const CachedRun& run(const std::string& name, const Overrides& extra = {}, int workers = 0) {
    if (workers <= 0) workers = options_.workers;
    std::string key = name + "|" + std::to_string(workers);
    for (const auto& [k, v] : extra) key += "|" + k + "=" + v;
    auto it = cache_.find(key);
    if (it != cache_.end()) return *it->second;
    const auto start = Clock::now();
    auto cached = std::make_unique<CachedRun>();
    cached->run = run_scenario(config(name, extra), workers);
    cached->seconds = std::chrono::duration<double>(Clock::now() - start).count();
    cached->metrics = beam_metrics(cached->run.log);
    return *cache_.emplace(key, std::move(cached)).first->second;
  }

  int workers() const { return options_.workers; }

 private:
  VerifyOptions options_;
  Overrides base_;
  std::map<std::string, std::unique_ptr<CachedRun>> cache_;
};

std::string failure_note(const TrajectoryLog& log) {
  return log.error ? " [" + log.error->message + "]" : std::string();
}

// --- individual checks -------------------------------------------------------

CheckResult check_envelope(Session& s, bool paper_scale) {
  const double tol = 0.02;
  const double time_limit = paper_scale ? 300.0 : 60.0;
  const auto& r = paper_scale ? s.run("free_gaussian", {{"paper_scale", "true"}}) : s.run("free_gaussian");
  CheckResult out;
  if (r.metrics.size() <= 5) {
    out.detail = "too few samples" + failure_note(r.log());
    return out;
  }
  const auto c = compare_envelope(r.metrics, r.run.config.regime.wavelength_ratio);
  out.passed = r.log().ok() && c.max_rel_err <= tol && r.seconds <= time_limit;
  out.detail = format("max envelope deviation %.3e at z=%.1f (tol %.0e); run %.1f s (limit %.0f s); z_end %.1f",
                      c.max_rel_err, c.at_z, tol, r.seconds, time_limit, r.metrics.back().z_axis) +
               failure_note(r.log());
  return out;
}

CheckResult check_constant_force(Session& s) {
  const auto& r = s.run("constant_force");
  CheckResult out;
  const auto z = first_turning_z(r.log());
  const double expected = *r.run.config.oracles.turning_z;
  if (!z) {
    out.detail = "no turning event" + failure_note(r.log());
    return out;
  }
  const double err = std::abs(*z - expected) / expected;
  out.passed = err <= 0.01;
  out.detail = format("turning z %.6f vs E/F %.6f, rel err %.2e (tol 1e-02)", *z, expected, err);
  return out;
}

CheckResult check_harmonic(Session& s) {
  const auto& r = s.run("harmonic");
  CheckResult out;
  const auto h = measure_harmonic(r.metrics);
  if (!h) {
    out.detail = "fewer than two axial p_z zero crossings" + failure_note(r.log());
    return out;
  }
  const auto& o = *r.run.config.oracles.harmonic;
  const double amp_err = std::abs(h->amplitude - o.amplitude) / o.amplitude;
  const double period_err = std::abs(h->period - o.period) / o.period;
  out.passed = r.log().ok() && amp_err <= 0.01 && period_err <= 0.01 && h->rms_end > h->rms_start;
  out.detail = format("amplitude rel err %.2e, period rel err %.2e (tol 1e-02); rms %.6e -> %.6e at 2T",
                      amp_err, period_err, h->rms_start, h->rms_end) +
               failure_note(r.log());
  return out;
}

CheckResult check_barrier(Session& s) {
  CheckResult out;
  const auto& low = s.run("barrier", {{"E_over_V0", "0.5"}});
  const auto& high = s.run("barrier", {{"E_over_V0", "5"}});
  const auto z = first_turning_z(low.log());
  const double expected_z = *low.run.config.oracles.turning_z;
  const double z_err = z ? std::abs(*z - expected_z) / expected_z : INFINITY;
  const auto& last = high.log().last().front;
  const int axis = last.axis_index();
  const double p_far = last.momentum.col(axis).norm();
  const double p_err = std::abs(p_far - 1.0);
  const bool through = high.log().ok() && high.log().termination == Termination::PlaneReached;
  out.passed = z_err <= 0.01 && through && p_err <= 0.005;
  out.detail = format("E/V0=0.5 turning z %.4f vs root %.4f (rel %.2e, tol 1e-02); "
                      "E/V0=5 %s, far |p| %.7f (rel %.2e, tol 5e-03)",
                      z.value_or(NAN), expected_z, z_err, through ? "transmitted" : "not transmitted", p_far,
                      p_err) +
               failure_note(high.log());
  return out;
}

CheckResult check_step(Session& s) {
  CheckResult out;
  const auto& r = s.run("step", {{"E_over_V0", "2"}});
  const double expected = 1.0 / std::numbers::sqrt2;
  const double pz = r.metrics.back().axial_pz;
  const double err = std::abs(pz - expected) / expected;
  out.passed = r.log().ok() && err <= 0.005;
  out.detail = format("transmitted p_z %.7f vs 1/sqrt2, rel err %.2e (tol 5e-03)", pz, err) + failure_note(r.log());
  return out;
}

CheckResult check_lens(Session& s) {
  CheckResult out;
  const auto& eik = s.run("lens", {{"numerics.eikonal_mode", "true"}});
  const auto& full = s.run("lens");
  const auto caustic = std::find_if(eik.log().events.begin(), eik.log().events.end(),
                                    [](const Event& e) { return e.kind == EventKind::Caustic; });
  const bool has_caustic = caustic != eik.log().events.end();
  double eik_min = INFINITY;
  for (const auto& m : eik.metrics) eik_min = std::min(eik_min, m.rms_width);
  double full_min = INFINITY;
  double full_peak = 0.0;
  for (const auto& m : full.metrics) {
    full_min = std::min(full_min, m.rms_width);
    full_peak = std::max(full_peak, m.peak_intensity);
  }
  const double launch_peak = full.metrics.front().peak_intensity;
  const bool completed = full.log().ok() && full.log().termination == Termination::PlaneReached;
  out.passed = has_caustic && completed && std::isfinite(full_min) && full_min > 0.0 && full_min > eik_min &&
               full_peak > launch_peak;
  out.detail = format("eikonal caustic %s; full-W %s, min rms %.5f (eikonal %.5f), waist peak %.4f vs launch %.4f",
                      has_caustic ? format("at z=%.2f", caustic->z).c_str() : "missing",
                      completed ? "completed" : "did not complete", full_min, eik_min, full_peak, launch_peak) +
               failure_note(full.log());
  return out;
}

double mirror_error(const TrajectoryLog& log) {
  double worst = 0.0;
  for (const auto& sample : log.samples) {
    const auto& f = sample.front;
    const int n = f.size();
    for (int i = 0; i < n; ++i) {
      const int j = n - 1 - i;
      worst = std::max({worst, std::abs(f.position(kX, i) + f.position(kX, j)),
                        std::abs(f.position(kZ, i) - f.position(kZ, j))});
    }
  }
  return worst;
}

// Runs `steps` forward, flips every momentum and runs the same number back.
double time_reversal_error(const ScenarioConfig& config, int steps, int workers) {
  const auto validated = validate_scenario(config);
  Propagator prop(make_medium(validated, config.potential, config.index), config.numerics, workers);
  WaveFront front = launch_front(config);
  const RayColumns start = front.position;
  prop.evaluate(front);
  for (int k = 0; k < steps; ++k) front = prop.advance_step(front).front;
  front.momentum = -front.momentum;
  refresh_geometry(front);
  prop.evaluate(front);
  for (int k = 0; k < steps; ++k) front = prop.advance_step(front).front;
  return (front.position - start).colwise().norm().maxCoeff();
}

// Axis-ray state after one period of the eikonal oscillator at T / steps.
Eigen::Vector4d harmonic_state(const Session& s, int steps) {
  auto config = s.config("harmonic", {{"numerics.eikonal_mode", "true"}});
  const double period = config.oracles.harmonic->period;
  config.numerics.dt = period / steps;
  const auto validated = validate_scenario(config);
  Propagator prop(make_medium(validated, config.potential, config.index), config.numerics, 1);
  WaveFront front = launch_front(config);
  prop.evaluate(front);
  for (int k = 0; k < steps; ++k) front = prop.advance_step(front).front;
  const int a = front.axis_index();
  Eigen::Vector4d v;
  v << front.position.col(a), front.momentum.col(a);
  return v;
}

CheckResult check_invariants(Session& s) {
  CheckResult out;
  std::vector<std::string> notes;
  bool ok = true;

  // (a) flux law on every run the other checks use
  double flux = 0.0;
  const std::vector<std::pair<std::string, Overrides>> runs = {
      {"free_gaussian", {}}, {"twin_gaussian", {}}, {"constant_force", {}},
      {"harmonic", {}},      {"lens", {}},          {"barrier", {{"E_over_V0", "0.5"}}},
      {"barrier", {{"E_over_V0", "5"}}}, {"step", {{"E_over_V0", "2"}}}, {"classical_vacuum", {}}};
  for (const auto& [name, extra] : runs) flux = std::max(flux, s.run(name, extra).log().max_flux_deviation);
  ok &= flux <= 1e-12;
  notes.push_back(format("(a) flux %.1e", flux));

  // (b) |p| in free space, W on
  const double pmag = std::max(s.run("free_gaussian").log().max_pmag_drift,
                               s.run("classical_vacuum").log().max_pmag_drift);
  ok &= pmag <= 1e-12;
  notes.push_back(format("(b) |p| %.1e", pmag));

  // (c) eikonal H over the constant-force run
  const auto& eik = s.run("constant_force", {{"numerics.eikonal_mode", "true"}});
  ok &= eik.log().ok() && eik.log().max_h_drift <= 1e-8;
  notes.push_back(format("(c) H %.1e", eik.log().max_h_drift));

  // (d) mirror symmetry
  const double mirror = std::max(mirror_error(s.run("free_gaussian").log()), mirror_error(s.run("twin_gaussian").log()));
  ok &= mirror <= 1e-9;
  notes.push_back(format("(d) mirror %.1e", mirror));

  // (e) time reversal: through the lens slab without W, free diffraction with W
  const double rev_eik =
      time_reversal_error(s.config("lens", {{"numerics.eikonal_mode", "true"}}), 1000, s.workers());
  const double rev_full = time_reversal_error(s.config("free_gaussian"), 1000, s.workers());
  ok &= rev_eik <= 1e-6 && rev_full <= 1e-4;
  notes.push_back(format("(e) reversal %.1e / %.1e", rev_eik, rev_full));

  // (f) RK4 order by step halving
  std::vector<Eigen::Vector4d> states;
  for (int steps : {32, 64, 128, 256}) states.push_back(harmonic_state(s, steps));
  double order = INFINITY;
  for (std::size_t k = 0; k + 2 < states.size(); ++k) {
    const double coarse = (states[k] - states[k + 1]).norm();
    const double fine = (states[k + 1] - states[k + 2]).norm();
    order = std::min(order, std::log2(coarse / fine));
  }
  ok &= order >= 3.8;
  notes.push_back(format("(f) order %.2f", order));

  out.passed = ok;
  for (std::size_t k = 0; k < notes.size(); ++k) out.detail += (k ? "; " : "") + notes[k];
  return out;
}

double max_state_difference(const TrajectoryLog& a, const TrajectoryLog& b) {
  if (a.samples.size() != b.samples.size()) return INFINITY;
  double worst = 0.0;
  for (std::size_t k = 0; k < a.samples.size(); ++k) {
    const auto& fa = a.samples[k].front;
    const auto& fb = b.samples[k].front;
    worst = std::max({worst, (fa.position - fb.position).cwiseAbs().maxCoeff(),
                      (fa.momentum - fb.momentum).cwiseAbs().maxCoeff()});
  }
  return worst;
}

CheckResult check_cross_regime(Session& s) {
  CheckResult out;
  const auto& nr = s.run("free_gaussian");
  const auto& cl = s.run("classical_vacuum");
  const double classical = max_state_difference(nr.log(), cl.log());

  // rest energy 1e4 times the kinetic energy
  const auto& rel = s.run("free_gaussian", {{"regime", "relativistic"}, {"rest_energy_ratio", format("%.17g", 1e4 / (1e4 + 1.0))}});
  double rel_err = INFINITY;
  if (rel.log().samples.size() == nr.log().samples.size()) {
    rel_err = 0.0;
    for (std::size_t k = 1; k < nr.log().samples.size(); ++k) {
      const auto& fa = nr.log().samples[k].front;
      const auto& fb = rel.log().samples[k].front;
      for (int i = 0; i < fa.size(); ++i) {
        rel_err = std::max(rel_err, (fa.position.col(i) - fb.position.col(i)).norm() / fa.position.col(i).norm());
      }
    }
  }

  // massless: every ray at c
  const auto& light = s.run("free_gaussian", {{"regime", "relativistic"}, {"rest_energy_ratio", "0"}, {"numerics.z_end", "50"}});
  const auto medium = make_medium(light.run.validated, light.run.config.potential, light.run.config.index);
  const auto& units = light.run.validated.units;
  const double scale = units.length / units.time / light.run.config.regime.light_speed;
  double speed_err = 0.0;
  for (const auto& sample : light.log().samples) {
    const auto& f = sample.front;
    for (int i = 0; i < f.size(); ++i) {
      const double v = velocity(medium, f.position.col(i), f.momentum.col(i)).norm() * scale;
      speed_err = std::max(speed_err, std::abs(v - 1.0));
    }
  }

  out.passed = nr.log().ok() && cl.log().ok() && rel.log().ok() && light.log().ok() && classical <= 1e-10 &&
               rel_err <= 1e-4 && speed_err <= 1e-9;
  out.detail = format("classical vs NR %.1e (tol 1e-10); REL vs NR %.1e (tol 1e-04); massless |v/c - 1| %.1e (tol 1e-09)",
                      classical, rel_err, speed_err);
  return out;
}

CheckResult check_strict(Session& s) {
  CheckResult out;
  const auto& r = s.run("free_gaussian", {{"numerics.strict_eq29", "true"}});
  const double ratio = r.run.config.regime.wavelength_ratio;
  const double rayleigh = std::numbers::pi / ratio;
  double growth = 0.0;
  for (const auto& m : r.metrics) {
    growth = std::max({growth, std::abs(m.envelope_plus - 1.0), std::abs(-m.envelope_minus - 1.0)});
  }
  auto envelope_at = [&](double z) {
    for (std::size_t k = 1; k < r.metrics.size(); ++k) {
      const auto& a = r.metrics[k - 1];
      const auto& b = r.metrics[k];
      if (a.z_axis <= z && z <= b.z_axis) {
        const double w = (z - a.z_axis) / (b.z_axis - a.z_axis);
        return (1.0 - w) * a.envelope_plus + w * b.envelope_plus;
      }
    }
    return std::numeric_limits<double>::quiet_NaN();
  };
  const double at_zr = envelope_at(rayleigh);
  const double dev_zr = std::abs(at_zr - analytic_waist(rayleigh, ratio)) / analytic_waist(rayleigh, ratio);
  const double at_2zr = r.metrics.back().envelope_plus;
  const double z_last = r.metrics.back().z_axis;
  const double dev_2zr = std::abs(at_2zr - analytic_waist(z_last, ratio)) / analytic_waist(z_last, ratio);
  out.passed = r.log().ok() && growth <= 1e-12 && dev_zr > 0.30;
  out.detail = format("envelope growth %.1e; deviation at z_R %.4f (needs > 0.30, zero growth gives 1 - 1/sqrt2 = 0.2929); "
                      "at z=%.0f %.4f",
                      growth, dev_zr, z_last, dev_2zr) +
               failure_note(r.log());
  return out;
}

CheckResult check_determinism(Session& s) {
  CheckResult out;
  const std::vector<std::pair<std::string, Overrides>> runs = {{"free_gaussian", {}},
                                                               {"twin_gaussian", {}},
                                                               {"lens", {}},
                                                               {"harmonic", {}},
                                                               {"barrier", {{"E_over_V0", "0.5"}}}};
  std::vector<std::string> differing;
  for (const auto& [name, extra] : runs) {
    const auto& one = s.run(name, extra, 1);
    const auto& many = s.run(name, extra, 8);
    const bool same = trajectories_csv(one.log()) == trajectories_csv(many.log()) &&
                      metrics_csv(one.metrics) == metrics_csv(many.metrics) &&
                      summary_json(name, &one.run, evaluate_oracles(one.run.config, one.log(), one.metrics), one.log().error) ==
                          summary_json(name, &many.run, evaluate_oracles(many.run.config, many.log(), many.metrics), many.log().error);
    if (!same) differing.push_back(name);
  }
  out.passed = differing.empty();
  if (out.passed) {
    out.detail = format("CSV bytes and summaries identical for workers 1 and 8 on %zu runs", runs.size());
  } else {
    out.detail = "outputs differ for:";
    for (const auto& n : differing) out.detail += " " + n;
  }
  return out;
}

using CheckFn = CheckResult (*)(Session&);

CheckFn check_function(const std::string& name) {
  static const std::map<std::string, CheckFn> table = {
      {"envelope", [](Session& s) { return check_envelope(s, false); }},
      {"paper_scale", [](Session& s) { return check_envelope(s, true); }},
      {"constant_force", check_constant_force},
      {"harmonic", check_harmonic},
      {"barrier", check_barrier},
      {"step", check_step},
      {"lens", check_lens},
      {"invariants", check_invariants},
      {"cross_regime", check_cross_regime},
      {"strict_eq29", check_strict},
      {"determinism", check_determinism},
  };
  return table.at(name);
}

}  // namespace

const std::vector<CheckInfo>& check_registry() {
  static const std::vector<CheckInfo> registry = {
      {1, "envelope", "free Gaussian envelope against the waist law, desk scale", false},
      {2, "paper_scale", "free Gaussian envelope at lambda0/w0 = 1e-4 out to z = 1e4 w0", true},
      {3, "constant_force", "turning point at E/F", false},
      {4, "harmonic", "n = 10 amplitude, period and widening", false},
      {5, "barrier", "reflection below the barrier top, transmission above it", false},
      {6, "step", "transmitted p_z over a step at E/V0 = 2", false},
      {7, "lens", "eikonal focus against the diffraction-limited waist", false},
      {8, "invariants", "flux, |p|, eikonal H, mirror symmetry, time reversal, RK4 order", false},
      {9, "cross_regime", "classical, relativistic and non-relativistic systems agree in free space", false},
      {10, "strict_eq29", "the printed projection factor gives no diffraction", false},
      {11, "determinism", "identical output for 1 and 8 workers", false},
  };
  return registry;
}

std::vector<CheckResult> run_checks(const VerifyOptions& options,
                                    const std::function<void(const CheckResult&)>& on_result) {
  const auto& reg = check_registry();
  for (const auto& name : options.subset) {
    if (std::none_of(reg.begin(), reg.end(), [&](const CheckInfo& c) { return c.name == name; })) {
      throw Error(ErrorKind::InvalidOverride, "no check named '" + name + "'");
    }
  }
  Session session(options);
  std::vector<CheckResult> results;
  for (const auto& info : reg) {
    const bool named = std::find(options.subset.begin(), options.subset.end(), info.name) != options.subset.end();
    if (options.subset.empty() ? (info.slow && !options.include_slow) : !named) continue;
    const auto start = Clock::now();
    CheckResult r;
    try {
      r = check_function(info.name)(session);
    } catch (const Error& e) {
      r.passed = false;
      r.detail = e.what();
    }
    r.criterion = info.criterion;
    r.name = info.name;
    r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    if (on_result) on_result(r);
    results.push_back(std::move(r));
  }
  return results;
}

std::string format_check(const CheckResult& r) {
  return format("[%s] %2d %-15s %s (%.1f s)", r.passed ? "PASS" : "FAIL", r.criterion, r.name.c_str(),
                r.detail.c_str(), r.seconds);
}

}  // namespace wavetraj
