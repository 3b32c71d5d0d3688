#include "wavetraj/dynamics.hpp"

#include <cmath>

namespace wavetraj {

Medium make_medium(const ValidatedConfig& config, PotentialField potential,
                   RefractiveIndexField index) {
  Medium m;
  m.regime = config.regime.regime;
  m.epsilon = config.scales.epsilon;
  m.beta2 = config.scales.beta2;
  m.rest_ratio = config.scales.rest_ratio;
  m.potential = std::move(potential);
  m.index = std::move(index);
  return m;
}

bool Medium::is_free_space() const {
  if (!std::holds_alternative<Free>(potential)) return false;
  if (regime != Regime::Classical) return true;
  const auto* uniform = std::get_if<UniformIndex>(&index);
  return uniform && uniform->n0 == 1.0;
}

Vec2d velocity(const Medium& medium, const Vec2d& r, const Vec2d& p) {
  if (medium.regime != Regime::Relativistic) return p;
  const double headroom = 1.0 - eval_potential<double>(medium.potential, r);
  if (!(headroom > 0.0)) throw Error(ErrorKind::RelativisticPole, "E - V <= 0 at ray position");
  return p / headroom;
}

Vec2d momentum_rate(const Medium& medium, const Vec2d& r, const Vec2d& w_force) {
  switch (medium.regime) {
    case Regime::NonRelativistic:
      return -0.5 * eval_gradient<double>(medium.potential, r) + w_force;
    case Regime::Relativistic: {
      if (!(eval_potential<double>(medium.potential, r) < 1.0)) {
        throw Error(ErrorKind::RelativisticPole, "E - V <= 0 at ray position");
      }
      return -eval_gradient<double>(medium.potential, r) / medium.beta2 + w_force;
    }
    case Regime::Classical:
      return 0.5 * eval_index_gradient<double>(medium.index, r) + w_force;
  }
  return w_force;
}

double hamiltonian(const Medium& medium, const Vec2d& r, const Vec2d& p, double wave_potential) {
  switch (medium.regime) {
    case Regime::NonRelativistic:
      return p.squaredNorm() + eval_potential<double>(medium.potential, r) + wave_potential;
    case Regime::Relativistic: {
      const double radicand = medium.beta2 * p.squaredNorm() +
                              medium.rest_ratio * medium.rest_ratio + 2.0 * wave_potential;
      if (!(radicand >= 0.0)) throw Error(ErrorKind::NonFinite, "negative radicand in relativistic H");
      return eval_potential<double>(medium.potential, r) + std::sqrt(radicand);
    }
    case Regime::Classical: {
      const double n = eval_index<double>(medium.index, r);
      return 0.5 * p.squaredNorm() - 0.5 * n * n + wave_potential;
    }
  }
  return 0.0;
}

Propagator::Propagator(Medium medium, NumericsConfig numerics, int workers)
    : medium_(std::move(medium)),
      numerics_(std::move(numerics)),
      pool_(std::make_unique<RayPool>(workers)) {}

void Propagator::evaluate(WaveFront& front, const WaveFront* previous) const {
  const int n = front.size();
  auto& w = front.wave;
  for (auto& f : front.flags) f &= ~(kFlagStalled | kFlagBelowFloor);
  if (numerics_.eikonal_mode) {
    w.laplacian = RayValues::Zero(n);
    w.potential = RayValues::Zero(n);
    w.drive = RayValues::Zero(n);
    w.force = RayColumns::Zero(2, n);
    return;
  }
  const auto runner = pool_->runner();
  const auto derivatives = estimate_log_amplitude_derivatives(front, numerics_.fit_window, runner);
  const auto projection =
      numerics_.strict_paper_eq29 ? LaplacianProjection::StrictPrinted : numerics_.projection;
  auto lap = laplacian_ratio(front, derivatives, projection,
                             previous ? &previous->wave.laplacian : nullptr);
  for (int i = 0; i < n; ++i) {
    if (lap.stalled[i]) front.flags[i] |= kFlagStalled;
    if (!derivatives.fitted[i]) front.flags[i] |= kFlagBelowFloor;
  }
  w.laplacian = std::move(lap.values);
  const auto coupling = medium_.coupling(false);
  w.potential = wave_potential(coupling, w.laplacian);
  wave_potential_force(front, w.potential, coupling, medium_.potential, numerics_.fit_window,
                       w.drive, w.force, runner);
}

RayValues Propagator::hamiltonians(const WaveFront& front) const {
  RayValues h(front.size());
  for (int i = 0; i < front.size(); ++i) {
    h(i) = hamiltonian(medium_, front.position.col(i), front.momentum.col(i), front.wave.potential(i));
  }
  return h;
}

StepResult Propagator::advance_step(const WaveFront& front) const {
  const int n = front.size();
  const double dt = numerics_.dt;
  StepResult out{front, {}};
  WaveFront& next = out.front;

  pool_->run(n, [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      const Vec2d r0 = front.position.col(i);
      const Vec2d p0 = front.momentum.col(i);
      const double side = front.tangent.col(i).dot(quarter_turn(p0)) < 0.0 ? -1.0 : 1.0;
      const double drive = side * front.wave.drive(i);

      // the frozen W-force magnitude, kept orthogonal to the stage momentum
      auto rates = [&](const Vec2d& r, const Vec2d& p, Vec2d& dr, Vec2d& dp) {
        dr = velocity(medium_, r, p);
        const double pm = std::max(p.norm(), kMomentumClamp);
        dp = momentum_rate(medium_, r, (drive / pm) * quarter_turn(p));
      };
      Vec2d k1r, k1p, k2r, k2p, k3r, k3p, k4r, k4p;
      rates(r0, p0, k1r, k1p);
      rates(r0 + 0.5 * dt * k1r, p0 + 0.5 * dt * k1p, k2r, k2p);
      rates(r0 + 0.5 * dt * k2r, p0 + 0.5 * dt * k2p, k3r, k3p);
      rates(r0 + dt * k3r, p0 + dt * k3p, k4r, k4p);
      next.position.col(i) = r0 + (dt / 6.0) * (k1r + 2.0 * k2r + 2.0 * k3r + k4r);
      next.momentum.col(i) = p0 + (dt / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    }
  });

  refresh_geometry(next, &front);
  transport_amplitude(front, next, numerics_.caustic_min_spacing);
  evaluate(next, &front);

  if (!next.position.allFinite() || !next.momentum.allFinite() || !next.amplitude.allFinite() ||
      !next.wave.potential.allFinite() || !next.wave.force.allFinite()) {
    throw Error(ErrorKind::NonFinite, "non-finite value in front state");
  }

  auto& d = out.diagnostics;
  d.hamiltonian = hamiltonians(next);
  for (const unsigned f : next.flags) {
    if (f & kFlagStalled) ++d.stalled;
    if (f & kFlagMomentumClamped) ++d.clamped;
  }
  d.max_flux_deviation = max_flux_deviation(next);
  return out;
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Turning: return "turning";
    case EventKind::Caustic: return "caustic";
    case EventKind::Stall: return "stall";
  }
  return "unknown";
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::TimeLimit: return "t_end";
    case Termination::PlaneReached: return "z_end";
    case Termination::Turning: return "turning";
    case Termination::Error: return "error";
  }
  return "unknown";
}

namespace {

double interior_max(const RayValues& v) {
  const int n = static_cast<int>(v.size());
  double m = 0.0;
  for (int i = kEdgeRays; i < n - kEdgeRays; ++i) m = std::max(m, v(i));
  return m;
}

}  // namespace

TrajectoryLog integrate(const Propagator& propagator, WaveFront initial) {
  const auto& num = propagator.numerics();
  TrajectoryLog log;
  log.dt = num.dt;

  WaveFront front = std::move(initial);
  const int axis = front.axis_index();
  auto fail = [&](const Error& e, long step) {
    log.error = SimulationFailure{e.kind(), e.what()};
    log.termination = Termination::Error;
    if (e.kind() == ErrorKind::CausticCollapse) {
      log.events.push_back({EventKind::Caustic, step, step * num.dt, front.position(kZ, axis), e.what()});
    }
  };

  try {
    propagator.evaluate(front);
    log.h0 = propagator.hamiltonians(front);
  } catch (const Error& e) {
    fail(e, 0);
    log.h0 = RayValues::Zero(front.size());
    log.samples.push_back({0, 0.0, front, RayValues::Zero(front.size())});
    return log;
  }
  log.max_flux_deviation = max_flux_deviation(front);
  log.samples.push_back({0, 0.0, front, RayValues::Zero(front.size())});

  std::optional<long> step_limit;
  if (num.t_end) step_limit = static_cast<long>(std::ceil(*num.t_end / num.dt - 1e-9));
  if (step_limit && *step_limit <= 0) return log;
  if (num.z_end && front.position(kZ, axis) >= *num.z_end) {
    log.termination = Termination::PlaneReached;
    return log;
  }

  const bool free_space = propagator.medium().is_free_space();
  long recorded = 0;
  for (long step = 1;; ++step) {
    if (step > num.max_steps) {
      fail(Error(ErrorKind::MaxStepsExceeded, "no termination after " + std::to_string(num.max_steps) + " steps"),
           step - 1);
      break;
    }
    StepResult result;
    try {
      result = propagator.advance_step(front);
    } catch (const Error& e) {
      fail(e, step);
      break;
    }
    const double pz_before = front.momentum(kZ, axis);
    front = std::move(result.front);
    log.steps = step;
    const double t = static_cast<double>(step) * num.dt;
    const auto& diag = result.diagnostics;

    RayValues drift = (diag.hamiltonian - log.h0).cwiseAbs();
    log.max_h_drift = std::max(log.max_h_drift, interior_max(drift));
    log.max_flux_deviation = std::max(log.max_flux_deviation, diag.max_flux_deviation);
    if (free_space) {
      for (int i = 0; i < front.size(); ++i) {
        log.max_pmag_drift = std::max(log.max_pmag_drift, std::abs(front.momentum.col(i).norm() - 1.0));
      }
    }

    bool event = false;
    const double pz = front.momentum(kZ, axis);
    const double z = front.position(kZ, axis);
    const bool turned = (pz_before > 0.0 && pz <= 0.0) || (pz_before < 0.0 && pz >= 0.0);
    if (turned) {
      log.events.push_back({EventKind::Turning, step, t, z, "axis p_z changed sign"});
      event = true;
    }
    // one event per new high of the stalled count, not per flicker
    if (diag.stalled > log.max_stalled) {
      log.events.push_back({EventKind::Stall, step, t, z, std::to_string(diag.stalled) + " rays stalled"});
      event = true;
      log.max_stalled = diag.stalled;
    }

    bool done = false;
    if (turned && num.stop_at_turning) {
      log.termination = Termination::Turning;
      done = true;
    } else if (num.z_end && z >= *num.z_end) {
      log.termination = Termination::PlaneReached;
      done = true;
    } else if (step_limit && step >= *step_limit) {
      log.termination = Termination::TimeLimit;
      done = true;
    }

    if (done || event || step % num.record_stride == 0) {
      log.samples.push_back({step, t, front, std::move(drift)});
      recorded = step;
    }
    if (done) break;
  }
  if (log.error && recorded != log.steps) {
    log.samples.push_back({log.steps, log.steps * num.dt, front,
                           (propagator.hamiltonians(front) - log.h0).cwiseAbs()});
  }
  return log;
}

}  // namespace wavetraj
