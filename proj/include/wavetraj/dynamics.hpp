#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wavetraj/model.hpp"
#include "wavetraj/potentials.hpp"
#include "wavetraj/ray_pool.hpp"
#include "wavetraj/wavefront.hpp"

namespace wavetraj {

/// One of the three Hamiltonian systems in internal units.
///
/// Non-relativistic (time unit w0 m / p0, energies in E):
///   dr/dt = p,  dp/dt = -(1/2) grad(V + W),  H = p^2 + V + W.
/// Relativistic (time unit w0 E / (c^2 p0)):
///   dr/dt = p / (1 - V),  dp/dt = -(grad V + grad W / (1 - V)) / beta2,
///   H = V + sqrt(beta2 p^2 + rest_ratio^2 + 2 W).
/// Classical (time unit w0 / c, k in k0, energies in hbar omega):
///   dr/dt = k,  dk/dt = grad(n^2 / 2 - W),  D = k^2/2 - n^2/2 + W.
struct Medium {
  Regime regime = Regime::NonRelativistic;
  double epsilon = 0.0;
  double beta2 = 1.0;
  double rest_ratio = 0.0;
  PotentialField potential = Free{};
  RefractiveIndexField index = UniformIndex{};

  Coupling coupling(bool eikonal) const { return {regime, epsilon, beta2, eikonal}; }
  /// No potential and, for classical waves, a uniform index of 1.
  bool is_free_space() const;
};

Medium make_medium(const ValidatedConfig& config, PotentialField potential = Free{},
                   RefractiveIndexField index = UniformIndex{});

Vec2d velocity(const Medium& medium, const Vec2d& r, const Vec2d& p);

/// Momentum rate from the external field plus an already-scaled Wave-Potential
/// force (see wave_potential_force).
Vec2d momentum_rate(const Medium& medium, const Vec2d& r, const Vec2d& w_force);

double hamiltonian(const Medium& medium, const Vec2d& r, const Vec2d& p, double wave_potential);

struct StepDiagnostics {
  RayValues hamiltonian;
  int stalled = 0;
  int clamped = 0;
  double max_flux_deviation = 0.0;
};

struct StepResult {
  WaveFront front;
  StepDiagnostics diagnostics;
};

/// Advances a front by operator splitting: the Wave-Potential drive of each ray
/// is frozen for the step, the rays are advanced by classical RK4 on (r, p) with
/// the external field sampled at every stage, then the front geometry, amplitude
/// and wave state are rebuilt on the new positions.
///
/// The frozen drive enters each stage as a rotation rate of p (force magnitude
/// over the frozen |p|, applied to the stage momentum turned by a quarter), so
/// it stays orthogonal to p throughout the step and |p| is untouched by W.
class Propagator {
 public:
  Propagator(Medium medium, NumericsConfig numerics, int workers = 1);

  const Medium& medium() const { return medium_; }
  const NumericsConfig& numerics() const { return numerics_; }
  int workers() const { return pool_->workers(); }

  /// Fills front.wave (and stall flags). `previous` supplies frozen grad^2 R / R
  /// values for stalled rays.
  void evaluate(WaveFront& front, const WaveFront* previous = nullptr) const;

  StepResult advance_step(const WaveFront& front) const;

  RayValues hamiltonians(const WaveFront& front) const;

 private:
  Medium medium_;
  NumericsConfig numerics_;
  std::unique_ptr<RayPool> pool_;
};

enum class EventKind { Turning, Caustic, Stall };
std::string_view to_string(EventKind kind);

struct Event {
  EventKind kind;
  long step = 0;
  double t = 0.0;
  double z = 0.0;  // axis-ray z at the event
  std::string detail;
};

enum class Termination { TimeLimit, PlaneReached, Turning, Error };
std::string_view to_string(Termination t);

struct Sample {
  long step = 0;
  double t = 0.0;
  WaveFront front;
  RayValues h_drift;
};

struct SimulationFailure {
  ErrorKind kind;
  std::string message;
};

/// Rays this close to either end of the front are left out of beam-level
/// figures of merit (H drift, metrics); their one-sided fits are less reliable.
inline constexpr int kEdgeRays = 2;

struct TrajectoryLog {
  double dt = 0.0;
  long steps = 0;
  std::vector<Sample> samples;
  RayValues h0;
  std::vector<Event> events;
  Termination termination = Termination::TimeLimit;
  std::optional<SimulationFailure> error;
  double max_h_drift = 0.0;        // over interior rays
  double max_flux_deviation = 0.0;
  double max_pmag_drift = 0.0;     // ||p| - p0| over all rays; free space only
  int max_stalled = 0;

  bool ok() const { return !error.has_value(); }
  const Sample& last() const { return samples.back(); }
};

/// Runs from `initial` until t_end, until the axis ray reaches z_end, or (with
/// stop_at_turning) until the axis ray's p_z changes sign; whichever comes
/// first. Simulation errors end the run and are stored in the log together with
/// everything recorded up to that point.
TrajectoryLog integrate(const Propagator& propagator, WaveFront initial);

}  // namespace wavetraj
