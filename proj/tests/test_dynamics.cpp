#include <doctest.h>

#include <cmath>
#include <numbers>

#include "wavetraj/dynamics.hpp"
#include "wavetraj/scenarios.hpp"

using namespace wavetraj;

namespace {

ValidatedConfig validated(Regime regime, double rest_ratio = 0.0, NumericsConfig num = {}) {
  RegimeConfig r;
  r.regime = regime;
  if (regime == Regime::Relativistic) r.mass = rest_ratio;
  const auto v = validate_config(r, num);
  REQUIRE(v.ok());
  return *v.config;
}

}  // namespace

TEST_SUITE("dynamics") {
  TEST_CASE("velocity in the three systems") {
    const Vec2d r(0.3, 2.0);
    const Vec2d p(0.0, 1.0);
    const auto nr = make_medium(validated(Regime::NonRelativistic));
    CHECK((velocity(nr, r, p) - Vec2d(0.0, 1.0)).norm() == 0.0);

    // massless: E = pc, so c^2 p / E has magnitude c
    const auto cfg = validated(Regime::Relativistic, 0.0);
    const auto light = make_medium(cfg);
    const double speed = velocity(light, r, p).norm() * cfg.units.length / cfg.units.time;
    CHECK(speed == doctest::Approx(cfg.regime.light_speed).epsilon(1e-15));

    const auto ccfg = validated(Regime::Classical);
    const auto classical = make_medium(ccfg);
    const Vec2d v = velocity(classical, r, p);
    CHECK(v(kX) == 0.0);
    CHECK(v(kZ) * ccfg.units.length / ccfg.units.time == doctest::Approx(ccfg.regime.light_speed).epsilon(1e-15));
  }

  TEST_CASE("relativistic velocity has a pole at E = V") {
    const auto m = make_medium(validated(Regime::Relativistic, 0.5), ConstantForce{1.0});
    CHECK_THROWS_AS(velocity(m, Vec2d(0.0, 1.5), Vec2d(0.0, 1.0)), Error);
  }

  TEST_CASE("momentum rate examples") {
    const Vec2d zero(0.0, 0.0);
    CHECK(momentum_rate(make_medium(validated(Regime::NonRelativistic)), Vec2d(1.0, 5.0), zero).norm() == 0.0);
    CHECK(momentum_rate(make_medium(validated(Regime::Classical)), Vec2d(1.0, 5.0), zero).norm() == 0.0);

    // m omega^2 = 1 in user units, axis ray at z = 2: dp/dt = -grad V = (0, -2)
    const auto cfg = validated(Regime::NonRelativistic);
    const auto& u = cfg.units;
    const double stiffness = u.length * u.length / u.energy;  // m omega^2 w0^2 / E
    const auto medium = make_medium(cfg, Harmonic{stiffness});
    const Vec2d rate = momentum_rate(medium, Vec2d(0.0, u.to_internal(2.0, Dimension::Length)), zero);
    const Vec2d user_rate = rate * u.momentum / u.time;
    CHECK(user_rate(kX) == 0.0);
    CHECK(user_rate(kZ) == doctest::Approx(-2.0).epsilon(1e-12));
  }

  TEST_CASE("Hamiltonian examples") {
    // H(0) = E + W(0) with W = -eps^2 grad^2 R / R and grad^2 R / R = -2 on the axis
    auto config = build_scenario("free_gaussian");
    const auto v = validate_scenario(config);
    Propagator prop(make_medium(v, config.potential), config.numerics);
    WaveFront f = launch_front(config);
    prop.evaluate(f);
    const double eps = v.scales.epsilon;
    CHECK(prop.hamiltonians(f)(f.axis_index()) == doctest::Approx(1.0 + 2.0 * eps * eps).epsilon(1e-12));

    const auto classical = make_medium(validated(Regime::Classical));
    CHECK(hamiltonian(classical, Vec2d(0.0, 3.0), Vec2d(0.0, 1.0), 0.0) == 0.0);
  }

  TEST_CASE("eikonal free flight is exactly linear and keeps H = E") {
    NumericsConfig num;
    num.n_rays = 21;
    num.eikonal_mode = true;
    num.dt = 0.37;
    const auto medium = make_medium(validated(Regime::NonRelativistic, 0.0, num));
    Propagator prop(medium, num);
    const GaussianComponent g{0.0, 1.0};
    WaveFront f = init_gaussian_front(num, std::span(&g, 1), Vec2d(0.1, 0.9).normalized());
    const WaveFront start = f;
    prop.evaluate(f);
    for (int k = 1; k <= 50; ++k) {
      const auto step = prop.advance_step(f);
      f = step.front;
      for (int i = 0; i < f.size(); ++i) {
        const Vec2d expected = start.position.col(i) + k * num.dt * start.momentum.col(i);
        CHECK((f.position.col(i) - expected).norm() <= 1e-12);
        CHECK((f.momentum.col(i) - start.momentum.col(i)).norm() <= 1e-15);
        CHECK(step.diagnostics.hamiltonian(i) == doctest::Approx(1.0).epsilon(1e-15));
      }
    }
  }

  TEST_CASE("RK4 converges at fourth order on the eikonal oscillator") {
    // internal equations: z' = p_z, p_z' = -k z / 2, so omega = sqrt(k / 2)
    const double k = 1.0;
    const double omega = std::sqrt(k / 2.0);
    const double period = 2.0 * std::numbers::pi / omega;
    const double t_final = 0.8 * period;
    std::vector<double> errors;
    for (int steps : {40, 80, 160, 320, 640}) {
      NumericsConfig num;
      num.n_rays = 21;
      num.eikonal_mode = true;
      num.dt = t_final / steps;
      Propagator prop(make_medium(validated(Regime::NonRelativistic, 0.0, num), Harmonic{k}), num);
      const GaussianComponent g{0.0, 1.0};
      WaveFront f = init_gaussian_front(num, std::span(&g, 1), Vec2d(0.0, 1.0));
      prop.evaluate(f);
      for (int s = 0; s < steps; ++s) f = prop.advance_step(f).front;
      const int a = f.axis_index();
      const double z_exact = std::sin(omega * t_final) / omega;
      const double p_exact = std::cos(omega * t_final);
      errors.push_back(std::hypot(f.position(kZ, a) - z_exact, f.momentum(kZ, a) - p_exact));
    }
    for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
      const double order = std::log2(errors[i] / errors[i + 1]);
      CHECK(order >= 3.8);
      CHECK(order <= 4.3);
    }
  }

  TEST_CASE("twin front stays mirror symmetric for 10^4 steps") {
    auto config = build_scenario("twin_gaussian", {{"numerics.dt", "0.01"}, {"numerics.z_end", "none"},
                                                   {"numerics.t_end", "100"}, {"numerics.record_stride", "1000"}});
    const auto run = run_scenario(config);
    REQUIRE(run.log.ok());
    CHECK(run.log.steps == 10000);
    const auto& f = run.log.last().front;
    const int n = f.size();
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      worst = std::max(worst, std::abs(f.position(kX, i) + f.position(kX, n - 1 - i)));
      worst = std::max(worst, std::abs(f.position(kZ, i) - f.position(kZ, n - 1 - i)));
    }
    CHECK(worst <= 1e-9);
  }

  TEST_CASE("zero-step run returns the launch front only") {
    auto config = build_scenario("free_gaussian", {{"numerics.t_end", "0"}});
    const auto run = run_scenario(config);
    REQUIRE(run.log.samples.size() == 1);
    CHECK(run.log.steps == 0);
    CHECK(run.log.samples.front().t == 0.0);
    CHECK(run.log.ok());
  }

  TEST_CASE("stop at turning ends on the first axial p_z sign change") {
    auto config = build_scenario("constant_force", {{"numerics.stop_at_turning", "true"}});
    const auto run = run_scenario(config);
    REQUIRE(run.log.ok());
    CHECK(run.log.termination == Termination::Turning);
    const auto& samples = run.log.samples;
    const int a = samples.back().front.axis_index();
    CHECK(samples.back().front.momentum(kZ, a) <= 0.0);
    for (std::size_t k = 0; k + 1 < samples.size(); ++k) CHECK(samples[k].front.momentum(kZ, a) > 0.0);
  }

  TEST_CASE("eikonal energy is conserved through the constant-force turn") {
    const auto run = run_scenario(build_scenario("constant_force", {{"numerics.eikonal_mode", "true"},
                                                                    {"numerics.dt", "0.01"}}));
    REQUIRE(run.log.ok());
    CHECK(run.log.max_h_drift <= 1e-8);
  }

  TEST_CASE("time reversal returns the rays") {
    auto reversal_error = [](const ScenarioConfig& config, int steps) {
      const auto v = validate_scenario(config);
      Propagator prop(make_medium(v, config.potential), config.numerics);
      WaveFront f = launch_front(config);
      const RayColumns start = f.position;
      prop.evaluate(f);
      for (int k = 0; k < steps; ++k) f = prop.advance_step(f).front;
      f.momentum = -f.momentum;
      refresh_geometry(f);
      prop.evaluate(f);
      for (int k = 0; k < steps; ++k) f = prop.advance_step(f).front;
      return (f.position - start).colwise().norm().maxCoeff();
    };
    CHECK(reversal_error(build_scenario("lens", {{"eikonal_mode", "true"}}), 1000) <= 1e-6);
    CHECK(reversal_error(build_scenario("free_gaussian"), 1000) <= 1e-4);

    // the frozen-W splitting is first order: through the lens the return
    // error halves with dt
    const double coarse = reversal_error(build_scenario("lens", {{"numerics.dt", "0.05"}}), 500);
    const double fine = reversal_error(build_scenario("lens", {{"numerics.dt", "0.025"}}), 1000);
    CHECK(coarse / fine == doctest::Approx(2.0).epsilon(0.1));
  }
}
