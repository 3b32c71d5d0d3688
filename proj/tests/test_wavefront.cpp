#include <doctest.h>

#include <cmath>
#include <numbers>

#include "support.hpp"
#include "wavetraj/dynamics.hpp"
#include "wavetraj/local_fit.hpp"
#include "wavetraj/wavefront.hpp"

using namespace wavetraj;
using namespace wavetraj::testing;

namespace {

NumericsConfig default_numerics() {
  NumericsConfig n;
  n.n_rays = 201;
  n.front_half_width = 3.0;
  return n;
}

WaveFront launch_gaussian(std::vector<GaussianComponent> comps = {{0.0, 1.0}}) {
  return init_gaussian_front(default_numerics(), comps, Vec2d(0.0, 1.0));
}

constexpr int kWindow = 8;

}  // namespace

TEST_SUITE("wavefront") {
  TEST_CASE("single Gaussian launch front") {
    auto num = default_numerics();
    num.n_rays = 301;  // spacing 0.02 puts rays exactly at x = +-1
    const GaussianComponent g{0.0, 1.0};
    const auto f = init_gaussian_front(num, std::span(&g, 1), Vec2d(0.0, 1.0));
    const int plus = 200;
    CHECK(f.position(kX, plus) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(f.amplitude(plus) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(f.amplitude(plus) == doctest::Approx(0.367879).epsilon(1e-6));
    CHECK(f.amplitude(f.axis_index()) == 1.0);
    for (int i = 0; i < f.size(); ++i) {
      CHECK(f.momentum(kX, i) == 0.0);
      CHECK(f.xi(i) == doctest::Approx(f.position(kX, i)).epsilon(1e-14));
    }
  }

  TEST_CASE("twin launch front is mirror symmetric") {
    const auto f = launch_gaussian({{-2.0, 1.0}, {2.0, 1.0}});
    const int n = f.size();
    for (int i = 0; i < n; ++i) {
      CHECK(f.amplitude(i) == f.amplitude(n - 1 - i));
      CHECK(f.position(kX, i) == -f.position(kX, n - 1 - i));
    }
    CHECK(f.amplitude.maxCoeff() == 1.0);
  }

  TEST_CASE("quadratic fit reproduces a quadratic on a nonuniform grid") {
    const std::vector<double> xs = {-1.3, -0.2, 0.05, 0.4, 1.9, 2.2, 3.7};
    std::vector<double> ys, ws;
    for (double x : xs) {
      ys.push_back(0.7 - 1.1 * x + 2.5 * x * x);
      ws.push_back(1.0 + x * x);
    }
    const auto fit = fit_quadratic<double>(xs, ys, 0.4, ws);
    CHECK(fit.curvature() == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(fit.slope(0.4) == doctest::Approx(-1.1 + 5.0 * 0.4).epsilon(1e-12));
  }

  TEST_CASE("log-amplitude derivatives are exact for quadratic ln R") {
    const double a = 0.2, b = 0.4, c = -0.5;
    for (const auto& xs : {uniform_grid(101, 3.0), stretched_grid(101, 3.0)}) {
      const auto f = make_flat_front(xs, [&](double s) { return std::exp(a + b * s + c * s * s); });
      const auto d = estimate_log_amplitude_derivatives(f, kWindow);
      for (int i = 0; i < f.size(); ++i) {
        CHECK(d.fitted[i]);
        CHECK(d.first(i) == doctest::Approx(b + 2.0 * c * f.xi(i)).epsilon(1e-12).scale(1.0));
        CHECK(d.second(i) == doctest::Approx(2.0 * c).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("R = exp(-xi^2) gives g1(0) = 0 and g2 = -2") {
    const auto f = make_flat_front(stretched_grid(101, 3.0), [](double s) { return std::exp(-s * s); });
    const auto d = estimate_log_amplitude_derivatives(f, kWindow);
    CHECK(std::abs(d.first(f.axis_index())) <= 1e-12);
    for (int i = 0; i < f.size(); ++i) CHECK(d.second(i) == doctest::Approx(-2.0).epsilon(1e-11));
  }

  TEST_CASE("constant R gives vanishing derivatives") {
    const auto f = make_flat_front(stretched_grid(51, 2.0), [](double) { return 0.8; });
    const auto d = estimate_log_amplitude_derivatives(f, kWindow);
    CHECK(d.first.cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(d.second.cwiseAbs().maxCoeff() <= 1e-11);
  }

  TEST_CASE("rays below the amplitude floor are left out of the fits") {
    auto f = make_flat_front(uniform_grid(101, 3.0), [](double s) { return std::exp(-s * s); });
    // a wing ray far below the floor would wreck a quadratic fit of ln R
    f.amplitude(0) = 1e-30;
    f.flux_const(0) = 1e-60 * tube_width(f, 0);
    const auto d = estimate_log_amplitude_derivatives(f, kWindow);
    CHECK_FALSE(d.fitted[0]);
    CHECK(d.second(5) == doctest::Approx(-2.0).epsilon(1e-10));
  }

  TEST_CASE("launch Gaussian: grad^2 R / R = -2 + 4 x^2") {
    const auto f = launch_gaussian();
    const auto d = estimate_log_amplitude_derivatives(f, kWindow);
    const auto lap = laplacian_ratio(f, d, LaplacianProjection::Arclength);
    CHECK(lap.values(f.axis_index()) == doctest::Approx(-2.0).epsilon(1e-10));
    for (int i = kEdgeRays; i < f.size() - kEdgeRays; ++i) {
      const double x = f.position(kX, i);
      CHECK(lap.values(i) == doctest::Approx(-2.0 + 4.0 * x * x).epsilon(1e-9).scale(1.0));
    }
    const auto transverse = laplacian_ratio(f, d, LaplacianProjection::Transverse);
    CHECK(transverse.values(f.axis_index()) == doctest::Approx(-2.0).epsilon(1e-10));
  }

  TEST_CASE("printed projection factor vanishes on a planar launch front") {
    const auto f = launch_gaussian();
    const auto d = estimate_log_amplitude_derivatives(f, kWindow);
    const auto lap = laplacian_ratio(f, d, LaplacianProjection::StrictPrinted);
    CHECK(lap.values.cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("tilted front with p_x = p_z") {
    const Vec2d p = Vec2d(1.0, 1.0) / std::sqrt(2.0);
    const Vec2d t = Vec2d(1.0, -1.0) / std::sqrt(2.0);
    std::vector<Vec2d> pos;
    for (double s : uniform_grid(61, 3.0)) pos.push_back(s * t + Vec2d(0.0, 5.0));
    const auto f = make_front(pos, p, [](double s) { return std::exp(-0.5 * s * s + 0.1 * s); });
    const auto d = estimate_log_amplitude_derivatives(f, kWindow);
    const auto along = laplacian_ratio(f, d, LaplacianProjection::Arclength);
    const auto transverse = laplacian_ratio(f, d, LaplacianProjection::Transverse);
    const auto printed = laplacian_ratio(f, d, LaplacianProjection::StrictPrinted);
    for (int i = 0; i < f.size(); ++i) {
      const double base = d.second(i) + d.first(i) * d.first(i);
      CHECK(along.values(i) == doctest::Approx(base).epsilon(1e-12));
      CHECK(transverse.values(i) == doctest::Approx(2.0 * base).epsilon(1e-12));
      CHECK(printed.values(i) == doctest::Approx(base).epsilon(1e-12));
    }
  }

  TEST_CASE("stalled rays raise without a previous value and freeze with one") {
    const Vec2d p(1.0, 1e-5);
    std::vector<Vec2d> pos;
    for (double s : uniform_grid(41, 2.0)) pos.emplace_back(1e-5 * s, -s);
    const auto f = make_front(pos, p.normalized(), [](double s) { return std::exp(-s * s); });
    const auto d = estimate_log_amplitude_derivatives(f, kWindow);
    CHECK_THROWS_AS(laplacian_ratio(f, d, LaplacianProjection::Arclength), Error);
    const RayValues previous = RayValues::Constant(f.size(), -1.5);
    const auto lap = laplacian_ratio(f, d, LaplacianProjection::Arclength, &previous);
    CHECK(lap.stalled[0]);
    CHECK(lap.values(0) == -1.5);
  }

  TEST_CASE("wave potential per regime") {
    const double eps = 1.59155e-3;
    const RayValues lap = RayValues::Constant(3, -2.0);
    const Coupling nr{Regime::NonRelativistic, eps, 1.0, false};
    CHECK(wave_potential(nr, lap)(0) == doctest::Approx(2.0 * eps * eps).epsilon(1e-14));
    CHECK(wave_potential(nr, lap)(0) == doctest::Approx(5.0661e-6).epsilon(1e-4));
    const Coupling classical{Regime::Classical, eps, 1.0, false};
    CHECK(wave_potential(classical, lap)(0) == doctest::Approx(eps * eps).epsilon(1e-14));
    const Coupling rel{Regime::Relativistic, eps, 0.25, false};
    CHECK(wave_potential(rel, lap)(0) == doctest::Approx(0.25 * eps * eps).epsilon(1e-14));
    CHECK(wave_potential(nr, RayValues::Zero(3)).cwiseAbs().maxCoeff() == 0.0);
    const Coupling eik{Regime::NonRelativistic, eps, 1.0, true};
    CHECK(wave_potential(eik, lap).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("Wave-Potential force on the launch Gaussian") {
    const double eps = 1.59155e-3;
    const auto f = launch_gaussian();
    const auto d = estimate_log_amplitude_derivatives(f, kWindow);
    const auto lap = laplacian_ratio(f, d, LaplacianProjection::Arclength);
    const Coupling nr{Regime::NonRelativistic, eps, 1.0, false};
    const RayValues w = wave_potential(nr, lap.values);
    RayValues drive;
    RayColumns force;
    wave_potential_force(f, w, nr, Free{}, kWindow, drive, force);
    const int n = f.size();
    const int axis = f.axis_index();
    // W = eps^2 (2 - 4 x^2), so -dW/dx = 8 eps^2 x, halved in the NR momentum rate
    CHECK(std::abs(drive(axis)) <= 1e-18);
    for (int i = kEdgeRays; i < n - kEdgeRays; ++i) {
      const double x = f.position(kX, i);
      CHECK(drive(i) == doctest::Approx(4.0 * eps * eps * x).epsilon(1e-8).scale(eps * eps));
      CHECK(drive(i) == doctest::Approx(-drive(n - 1 - i)).epsilon(1e-12).scale(eps * eps));
      if (x > 0.0) CHECK(force(kX, i) > 0.0);
      CHECK(std::abs(force.col(i).dot(f.momentum.col(i))) <= 1e-15 * force.col(i).norm());
    }
  }

  TEST_CASE("uniform W exerts no force") {
    const auto f = launch_gaussian();
    const Coupling nr{Regime::NonRelativistic, 1e-3, 1.0, false};
    RayValues drive;
    RayColumns force;
    wave_potential_force(f, RayValues::Constant(f.size(), 3e-6), nr, Free{}, kWindow, drive, force);
    CHECK(force.cwiseAbs().maxCoeff() <= 1e-18);
  }

  TEST_CASE("flux transport") {
    const auto prev = make_flat_front(stretched_grid(51, 3.0), [](double s) { return std::exp(-s * s); });

    SUBCASE("rigid translation keeps R") {
      auto next = prev;
      next.position.row(kZ).array() += 5.0;
      refresh_geometry(next, &prev);
      transport_amplitude(prev, next, 1e-8);
      CHECK((next.amplitude - prev.amplitude).cwiseAbs().maxCoeff() <= 1e-14);
    }
    SUBCASE("doubled spacing scales R by 1/sqrt2") {
      auto next = prev;
      next.position.row(kX) *= 2.0;
      refresh_geometry(next, &prev);
      transport_amplitude(prev, next, 1e-8);
      for (int i = 0; i < next.size(); ++i) {
        CHECK(next.amplitude(i) == doctest::Approx(prev.amplitude(i) / std::sqrt(2.0)).epsilon(1e-14));
      }
    }
    SUBCASE("doubled |p| scales R by 1/sqrt2") {
      auto next = prev;
      next.momentum *= 2.0;
      refresh_geometry(next, &prev);
      transport_amplitude(prev, next, 1e-8);
      for (int i = 0; i < next.size(); ++i) {
        CHECK(next.amplitude(i) == doctest::Approx(prev.amplitude(i) / std::sqrt(2.0)).epsilon(1e-14));
      }
      CHECK(max_flux_deviation(next) <= 1e-14);
    }
  }

  TEST_CASE("caustic detection") {
    auto f = make_flat_front(uniform_grid(21, 2.0), [](double) { return 1.0; });
    CHECK_FALSE(detect_caustic(f, 1e-8));

    auto swapped = f;
    swapped.position.col(7).swap(swapped.position.col(8));
    refresh_geometry(swapped, &f);
    const auto report = detect_caustic(swapped, 1e-8);
    REQUIRE(report);
    CHECK(report->index >= 6);
    CHECK(report->index <= 8);

    // the whole front folded through a focus: every spacing positive again
    auto inverted = f;
    inverted.position.row(kX) *= -1.0;
    inverted.position.row(kZ).array() += 1.0;
    refresh_geometry(inverted, &f);
    CHECK_FALSE(detect_caustic(inverted, 1e-8));
    const auto folded = detect_caustic(inverted, 1e-8, &f);
    REQUIRE(folded);
    CHECK(folded->index == 0);
  }

  TEST_CASE("transport raises on collapse") {
    const auto prev = make_flat_front(uniform_grid(21, 2.0), [](double) { return 1.0; });
    auto next = prev;
    next.position.col(10) = next.position.col(11);
    refresh_geometry(next, &prev);
    CHECK_THROWS_AS(transport_amplitude(prev, next, 1e-8), Error);
  }
}
