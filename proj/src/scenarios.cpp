#include "wavetraj/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>

namespace wavetraj {

namespace {

constexpr const char* kAuto = "auto";
constexpr const char* kNone = "none";

// Desk-scale geometry; the paper-scale switch moves features out to 1e4 w0.
constexpr double kDeskRatio = 1e-2;
constexpr double kPaperRatio = 1e-4;
constexpr double kDeskFeatureZ = 200.0;
constexpr double kPaperFeatureZ = 1e4;
constexpr double kLensFocalLength = 50.0;

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Settings {
 public:
  void define(const std::string& key, std::string value) { values_[key] = std::move(value); }

  void apply(const std::string& key, const std::string& value) {
    if (key == "epsilon") {
      const double eps = parse_number(key, value);
      values_.at("wavelength_ratio") = format_number(2.0 * std::numbers::pi * eps);
      return;
    }
    if (key == "eikonal_mode" || key == "strict_eq29") {
      apply("numerics." + key, value);
      return;
    }
    const auto it = values_.find(key);
    if (it == values_.end()) throw Error(ErrorKind::InvalidOverride, "unknown setting '" + key + "'");
    it->second = value;
  }

  const std::string& text(const std::string& key) const { return values_.at(key); }
  bool is_auto(const std::string& key) const { return text(key) == kAuto; }
  bool is_none(const std::string& key) const { return text(key) == kNone; }

  double number(const std::string& key) const { return parse_number(key, text(key)); }

  long integer(const std::string& key) const {
    const double v = number(key);
    if (v != std::floor(v)) throw Error(ErrorKind::InvalidOverride, key + " must be an integer");
    return static_cast<long>(v);
  }

  bool flag(const std::string& key) const {
    const auto& v = text(key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw Error(ErrorKind::InvalidOverride, key + " expects a boolean, got '" + v + "'");
  }

  double number_or(const std::string& key, double fallback) {
    if (is_auto(key)) {
      values_[key] = format_number(fallback);
      return fallback;
    }
    return number(key);
  }

  std::optional<double> optional_number(const std::string& key, std::optional<double> fallback) {
    if (is_none(key)) return std::nullopt;
    if (is_auto(key)) {
      values_[key] = fallback ? format_number(*fallback) : kNone;
      return fallback;
    }
    return number(key);
  }

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  static double parse_number(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (value.empty() || end != value.c_str() + value.size() || !std::isfinite(v)) {
      throw Error(ErrorKind::InvalidOverride, key + " expects a number, got '" + value + "'");
    }
    return v;
  }

  std::map<std::string, std::string> values_;
};

void define_common(Settings& s) {
  s.define("regime", "nonrelativistic");
  s.define("wavelength_ratio", kAuto);
  s.define("rest_energy_ratio", "0");
  s.define("paper_scale", "false");
  s.define("front.n_rays", "201");
  s.define("front.half_width", kAuto);
  s.define("numerics.dt", kAuto);
  s.define("numerics.t_end", kAuto);
  s.define("numerics.z_end", kAuto);
  s.define("numerics.stop_at_turning", "false");
  s.define("numerics.fit_window", "8");
  s.define("numerics.record_stride", kAuto);
  s.define("numerics.strict_eq29", "false");
  s.define("numerics.projection", "arclength");
  s.define("numerics.eikonal_mode", "false");
  s.define("numerics.caustic_min_spacing", "1e-8");
  s.define("numerics.max_steps", "20000000");
}

double force_gain(Regime regime, const DerivedScales& scales) {
  switch (regime) {
    case Regime::NonRelativistic: return 0.5;
    case Regime::Relativistic: return 1.0 / scales.beta2;
    case Regime::Classical: return 0.5;
  }
  return 1.0;
}

}  // namespace

const std::vector<ScenarioInfo>& scenario_registry() {
  static const std::vector<ScenarioInfo> registry = {
      {"free_gaussian", "Gaussian beam diffracting in free space, checked against the waist law"},
      {"twin_gaussian", "two neighbouring Gaussian beams placed symmetrically about the axis"},
      {"constant_force", "beam launched against a uniform force; stops near z = E/F and falls back"},
      {"barrier", "beam launched at a Gaussian potential barrier (E_over_V0 selects the case)"},
      {"step", "beam launched at a logistic potential step (E_over_V0 selects the case)"},
      {"lens", "collimated beam through a lens-like potential slab; eikonal_mode shows the point focus"},
      {"harmonic", "beam launched from z = 0 in a harmonic well at the n-th oscillator energy"},
      {"classical_vacuum", "free_gaussian for classical waves in a uniform medium (n = 1)"},
  };
  return registry;
}

HarmonicOracle harmonic_oracle(int n, double hbar, double mass, double omega) {
  HarmonicOracle o;
  o.energy = (n + 0.5) * hbar * omega;
  o.amplitude = std::sqrt(2.0 * o.energy / (mass * omega * omega));
  o.period = 2.0 * std::numbers::pi / omega;
  return o;
}

double analytic_waist(double z, double wavelength_ratio) {
  const double u = wavelength_ratio * z / std::numbers::pi;
  return std::sqrt(1.0 + u * u);
}

ScenarioConfig build_scenario(std::string_view name, const Overrides& overrides) {
  const auto& reg = scenario_registry();
  if (std::none_of(reg.begin(), reg.end(), [&](const ScenarioInfo& s) { return s.name == name; })) {
    throw Error(ErrorKind::UnknownScenario, "no scenario named '" + std::string(name) + "'");
  }

  Settings s;
  define_common(s);
  if (name == "twin_gaussian") s.define("separation", "4");
  if (name == "classical_vacuum") {
    s.define("regime", "classical");
    s.define("index.n0", "1");
    s.define("index.gradient_scale", "0");
  }
  if (name == "constant_force") s.define("potential.F", "0.01");
  if (name == "barrier") {
    s.define("E_over_V0", "1");
    s.define("potential.z_B", kAuto);
    s.define("potential.d", kAuto);
  }
  if (name == "step") {
    s.define("E_over_V0", "1");
    s.define("potential.z_S", kAuto);
    s.define("potential.alpha", "1");
  }
  if (name == "lens") {
    s.define("potential.V_L", kAuto);
    s.define("potential.z1", "20");
    s.define("potential.z2", "40");
  }
  if (name == "harmonic") s.define("n", "10");

  for (const auto& [key, value] : overrides) s.apply(key, value);

  ScenarioConfig c;
  c.name = std::string(name);
  c.paper_scale = s.flag("paper_scale");
  const double feature_z = c.paper_scale ? kPaperFeatureZ : kDeskFeatureZ;

  const auto regime = parse_regime(s.text("regime"));
  if (!regime) throw Error(ErrorKind::InvalidOverride, "unknown regime '" + s.text("regime") + "'");
  const bool free_space = name == "free_gaussian" || name == "twin_gaussian" || name == "classical_vacuum";
  if (*regime == Regime::Classical && !free_space) {
    throw Error(ErrorKind::InvalidOverride, "scenario '" + c.name + "' needs a matter-wave regime");
  }
  if (name == "harmonic" && *regime != Regime::NonRelativistic) {
    throw Error(ErrorKind::InvalidOverride, "harmonic runs the non-relativistic system");
  }

  c.regime.regime = *regime;
  c.regime.wavelength_ratio = s.number_or("wavelength_ratio", c.paper_scale ? kPaperRatio : kDeskRatio);
  switch (*regime) {
    case Regime::NonRelativistic:
      c.regime.hbar = 1.0;
      c.regime.mass = 1.0;
      c.regime.total_energy = 1.0;
      break;
    case Regime::Relativistic:
      // c = E = 1, so the rest mass equals m0 c^2 / E
      c.regime.hbar = 1.0;
      c.regime.light_speed = 1.0;
      c.regime.total_energy = 1.0;
      c.regime.mass = s.number("rest_energy_ratio");
      break;
    case Regime::Classical:
      c.regime.light_speed = 1.0;
      c.regime.angular_frequency = 1.0;
      break;
  }

  const double ratio = c.regime.wavelength_ratio;
  const double rayleigh = std::numbers::pi / ratio;
  auto& num = c.numerics;
  num.n_rays = static_cast<int>(s.integer("front.n_rays"));
  num.fit_window = static_cast<int>(s.integer("numerics.fit_window"));
  num.strict_paper_eq29 = s.flag("numerics.strict_eq29");
  {
    const auto& proj = s.text("numerics.projection");
    if (proj == "arclength") {
      num.projection = LaplacianProjection::Arclength;
    } else if (proj == "transverse") {
      num.projection = LaplacianProjection::Transverse;
    } else if (proj == "printed") {
      num.projection = LaplacianProjection::StrictPrinted;
    } else {
      throw Error(ErrorKind::InvalidOverride,
                  "numerics.projection must be arclength, transverse or printed, not " + proj);
    }
  }
  num.eikonal_mode = s.flag("numerics.eikonal_mode");
  num.caustic_min_spacing = s.number("numerics.caustic_min_spacing");
  num.max_steps = s.integer("numerics.max_steps");
  num.stop_at_turning = s.flag("numerics.stop_at_turning");

  c.components = {{0.0, 1.0}};
  double half_width = 3.0;
  std::optional<double> t_end;
  std::optional<double> z_end;

  if (name == "free_gaussian" || name == "classical_vacuum") {
    z_end = c.paper_scale ? kPaperFeatureZ : 2.0 * rayleigh;
    c.oracles.envelope = true;
    if (name == "classical_vacuum") {
      c.index = RadialParabolicIndex{s.number("index.n0"), s.number("index.gradient_scale")};
      if (s.number("index.gradient_scale") == 0.0) c.index = UniformIndex{s.number("index.n0")};
    }
  } else if (name == "twin_gaussian") {
    const double half_sep = 0.5 * s.number("separation");
    c.components = {{-half_sep, 1.0}, {half_sep, 1.0}};
    half_width = half_sep + 3.0;
    // the near-axis rays run into x = 0 a little past z_R / 2 at 201 rays
    z_end = 0.5 * rayleigh;
  } else if (name == "constant_force") {
    const double f = s.number("potential.F");
    c.potential = ConstantForce{f};
    c.oracles.turning_z = 1.0 / f;
    // up, stop at E/F, fall back to the launch plane
    if (f > 0.0) t_end = 4.0 / f;
  } else if (name == "barrier" || name == "step") {
    const double e_over_v0 = s.number("E_over_V0");
    if (!(e_over_v0 > 0.0)) throw Error(ErrorKind::InvalidOverride, "E_over_V0 must be > 0");
    const double v0 = 1.0 / e_over_v0;
    double far_z = 0.0;
    double center = 0.0;
    if (name == "barrier") {
      center = s.number_or("potential.z_B", feature_z);
      const double d = s.number_or("potential.d", c.paper_scale ? 1000.0 : 20.0);
      c.potential = GaussianBarrier{v0, center, d};
      far_z = center + 10.0 * d;
    } else {
      center = s.number_or("potential.z_S", feature_z);
      const double alpha = s.number("potential.alpha");
      c.potential = LogisticStep{v0, center, alpha};
      far_z = center + 100.0 / alpha;
    }
    if (e_over_v0 > 1.0) {
      z_end = far_z;
      const double v_far = name == "barrier" ? 0.0 : v0;
      c.oracles.asymptotic_pz = std::sqrt(1.0 - v_far);
    } else if (e_over_v0 < 1.0) {
      t_end = 2.0 * center;
      c.oracles.turning_z =
          classical_turning_point(c.potential, 1.0, Vec2d(0.0, 0.0), Vec2d(0.0, 1.0));
    } else {
      t_end = 3.0 * center;
    }
  } else if (name == "lens") {
    const double z1 = s.number("potential.z1");
    const double z2 = s.number("potential.z2");
    // integral of the slab profile is 3/4 of its length
    const double strength = s.number_or("potential.V_L", 1.0 / (kLensFocalLength * 0.75 * (z2 - z1)));
    c.potential = LensLike{strength, z1, z2};
    z_end = z2 + 2.0 * kLensFocalLength;
  } else if (name == "harmonic") {
    const long n = s.integer("n");
    if (n < 0) throw Error(ErrorKind::InvalidOverride, "n must be >= 0");
    const auto oracle = harmonic_oracle(static_cast<int>(n));
    c.regime.total_energy = oracle.energy;
    const auto scales = derive_scales(c.regime);
    const auto units = make_unit_system(c.regime, scales);
    const double w0 = units.length;
    // V / E_n in w0 units: (m omega^2 w0^2 / E_n) z^2 / 2
    c.potential = Harmonic{w0 * w0 / oracle.energy};
    HarmonicOracle internal;
    internal.energy = 1.0;
    internal.amplitude = units.to_internal(oracle.amplitude, Dimension::Length);
    internal.period = units.to_internal(oracle.period, Dimension::Time);
    c.oracles.harmonic = internal;
    t_end = 2.0 * internal.period;
  }

  num.front_half_width = s.number_or("front.half_width", half_width);
  num.t_end = s.optional_number("numerics.t_end", t_end);
  num.z_end = s.optional_number("numerics.z_end", z_end);

  const auto scales = derive_scales(c.regime);
  double dt = std::min(0.05, 0.1 / c.launch_momentum.norm());
  const double curvature = force_gain(*regime, scales) * curvature_scale(c.potential);
  if (curvature > 0.0) dt = std::min(dt, 0.05 / std::sqrt(curvature));
  num.dt = s.number_or("numerics.dt", dt);

  double horizon = 0.0;
  if (num.t_end) horizon = *num.t_end;
  if (num.z_end) horizon = horizon > 0.0 ? std::min(horizon, std::abs(*num.z_end)) : std::abs(*num.z_end);
  const double estimated_steps = horizon > 0.0 && num.dt > 0.0 ? horizon / num.dt : 0.0;
  const double stride = name == "harmonic" ? 1.0 : std::max(1.0, std::ceil(estimated_steps / 500.0));
  num.record_stride = static_cast<int>(s.number_or("numerics.record_stride", stride));

  c.settings = s.values();
  return c;
}

ValidatedConfig validate_scenario(const ScenarioConfig& config) {
  auto v = validate_config(config.regime, config.numerics);
  if (!v.ok()) throw Error(v.issues.front().kind, v.message());
  return *v.config;
}

WaveFront launch_front(const ScenarioConfig& config) {
  return init_gaussian_front(config.numerics, config.components, config.launch_momentum);
}

ScenarioRun run_scenario(const ScenarioConfig& config, int workers) {
  ScenarioRun run{config, validate_scenario(config), {}};
  Propagator propagator(make_medium(run.validated, config.potential, config.index), config.numerics,
                        workers);
  run.log = integrate(propagator, launch_front(config));
  return run;
}

namespace {

struct EnvelopeTrack {
  int lower = 0;
  int upper = 0;
  double weight = 0.0;  // share of `upper`

  double at(const WaveFront& f) const {
    return (1.0 - weight) * f.position(kX, lower) + weight * f.position(kX, upper);
  }
};

// Rays are ordered by launch x, which is also their id order.
EnvelopeTrack track_launch_x(const WaveFront& launch, double x0) {
  const int n = launch.size();
  EnvelopeTrack t;
  int j = 0;
  while (j + 1 < n && launch.position(kX, j + 1) < x0) ++j;
  t.lower = j;
  t.upper = std::min(j + 1, n - 1);
  const double xl = launch.position(kX, t.lower);
  const double xu = launch.position(kX, t.upper);
  t.weight = xu > xl ? (x0 - xl) / (xu - xl) : 0.0;
  if (std::abs(xu - x0) <= 1e-12) {
    t.lower = t.upper;
    t.weight = 0.0;
  } else if (std::abs(xl - x0) <= 1e-12) {
    t.upper = t.lower;
    t.weight = 0.0;
  }
  return t;
}

}  // namespace

std::vector<BeamMetrics> beam_metrics(const TrajectoryLog& log) {
  std::vector<BeamMetrics> out;
  if (log.samples.empty()) return out;
  const auto& launch = log.samples.front().front;
  const auto plus = track_launch_x(launch, 1.0);
  const auto minus = track_launch_x(launch, -1.0);

  out.reserve(log.samples.size());
  for (const auto& sample : log.samples) {
    const auto& f = sample.front;
    const int n = f.size();
    const int axis = f.axis_index();
    BeamMetrics m;
    m.t = sample.t;
    m.z_axis = f.position(kZ, axis);
    m.axial_x = f.position(kX, axis);
    m.axial_pz = f.momentum(kZ, axis);
    m.envelope_plus = plus.at(f);
    m.envelope_minus = minus.at(f);

    double wsum = 0.0;
    double xsum = 0.0;
    for (int i = kEdgeRays; i < n - kEdgeRays; ++i) {
      const double w = f.amplitude(i) * f.amplitude(i) * tube_width(f, i);
      wsum += w;
      xsum += w * f.position(kX, i);
      m.peak_intensity = std::max(m.peak_intensity, f.amplitude(i) * f.amplitude(i));
    }
    const double mean = xsum / wsum;
    double var = 0.0;
    for (int i = kEdgeRays; i < n - kEdgeRays; ++i) {
      const double w = f.amplitude(i) * f.amplitude(i) * tube_width(f, i);
      const double dx = f.position(kX, i) - mean;
      var += w * dx * dx;
    }
    m.rms_width = std::sqrt(var / wsum);
    out.push_back(m);
  }
  return out;
}

OracleComparison compare_to_oracle(const std::vector<BeamMetrics>& metrics,
                                   const std::function<double(const BeamMetrics&)>& metric,
                                   const std::function<double(double z)>& oracle, int skip) {
  if (static_cast<int>(metrics.size()) <= skip) {
    throw Error(ErrorKind::EmptyOverlap, "no samples left after skipping the first " + std::to_string(skip));
  }
  OracleComparison c;
  for (std::size_t k = static_cast<std::size_t>(skip); k < metrics.size(); ++k) {
    const double expected = oracle(metrics[k].z_axis);
    const double err = std::abs(metric(metrics[k]) - expected) / std::abs(expected);
    if (k == static_cast<std::size_t>(skip) || err > c.max_rel_err) {
      c.max_rel_err = err;
      c.at_z = metrics[k].z_axis;
    }
  }
  return c;
}

OracleComparison compare_envelope(const std::vector<BeamMetrics>& metrics, double wavelength_ratio,
                                  int skip) {
  const auto waist = [&](double z) { return analytic_waist(z, wavelength_ratio); };
  const auto up = compare_to_oracle(metrics, [](const BeamMetrics& m) { return m.envelope_plus; }, waist, skip);
  const auto down = compare_to_oracle(
      metrics, [](const BeamMetrics& m) { return -m.envelope_minus; }, waist, skip);
  return up.max_rel_err >= down.max_rel_err ? up : down;
}

}  // namespace wavetraj
