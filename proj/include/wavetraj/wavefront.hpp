#pragma once

#include <optional>
#include <span>
#include <vector>

#include "wavetraj/model.hpp"
#include "wavetraj/potentials.hpp"
#include "wavetraj/types.hpp"

namespace wavetraj {

/// Per-ray status bits, written to the `flags` column of trajectories.csv.
enum RayFlag : unsigned {
  kFlagStalled = 1u << 0,        // |p_z| / |p| below the stall threshold; L frozen
  kFlagMomentumClamped = 1u << 1,  // |p| below the turning-point clamp
  kFlagBelowFloor = 1u << 2,     // excluded from amplitude fits
};

inline constexpr double kAmplitudeFloor = 1e-6;   // relative to max R on the front
inline constexpr double kStallRatio = 1e-3;       // |p_z| / |p|
inline constexpr double kMomentumClamp = 1e-12;   // in p0

/// One trajectory, as a value. WaveFront stores the same data column-wise.
struct RayState {
  Vec2d position;
  Vec2d momentum;
  double amplitude = 0.0;
  double flux_const = 0.0;
  int id = 0;
};

/// Quantities derived from the amplitude profile of a front.
struct WaveState {
  RayValues laplacian;  // grad^2 R / R, in 1/w0^2
  RayValues potential;  // W, in the regime's energy unit
  RayValues drive;      // force magnitude along the oriented front tangent
  RayColumns force;     // drive * tangent; orthogonal to the momentum
};

/// Rays sharing a phase front, ordered by transverse position.
///
/// `tangent` is the unit front tangent at each ray, a quarter turn of the
/// momentum direction whose sign is carried over from step to step; `xi` is the
/// signed arclength along the front polyline measured from the axis ray.
struct WaveFront {
  RayColumns position;
  RayColumns momentum;
  RayColumns tangent;
  RayValues amplitude;
  RayValues flux_const;
  RayValues xi;
  std::vector<int> id;
  std::vector<unsigned> flags;
  WaveState wave;

  int size() const { return static_cast<int>(id.size()); }
  int axis_index() const { return size() / 2; }
  RayState ray(int i) const;
};

struct GaussianComponent {
  double center = 0.0;
  double weight = 1.0;
};

/// Builds the launch front at z = 0: rays uniformly spaced in x over
/// [-front_half_width, front_half_width], amplitude the normalized sum of the
/// Gaussian components (max R = 1), all momenta equal to `p_launch`.
WaveFront init_gaussian_front(const NumericsConfig& numerics,
                              std::span<const GaussianComponent> components,
                              const Vec2d& p_launch);

/// Refreshes tangents and xi. Each tangent is the quarter turn of p-hat,
/// oriented along increasing ray index (judged by the chord between the ray's
/// neighbours), so a pair of rays that swap order shows up as a negative xi
/// spacing. Rays with |p| below the clamp keep their `previous` tangent.
void refresh_geometry(WaveFront& front, const WaveFront* previous = nullptr);

/// Local flux-tube width: half the xi distance between the two neighbours,
/// one-sided at the ends.
double tube_width(const WaveFront& front, int i);

struct LogAmplitudeDerivatives {
  RayValues first;   // d lnR / d xi
  RayValues second;  // d^2 lnR / d xi^2
  std::vector<bool> fitted;  // false for rays below the amplitude floor
};

/// Weighted quadratic least-squares fits of ln R against xi over 2 * fit_window + 1
/// neighbours of each ray. Only the flux-tube part of R, sqrt(flux_const / width),
/// is fitted: the |p|^(-1/2) factor is transversally flat in free space and
/// under potentials of z alone, and it diverges at turning points.
/// Samples are weighted by flux_const times a Gaussian kernel in ray offset (see
/// fit_weight). Rays below the amplitude floor do not enter any fit; their
/// derivatives come from the nearest fitted ray's polynomial.
LogAmplitudeDerivatives estimate_log_amplitude_derivatives(const WaveFront& front, int fit_window,
                                                           const RangeRunner& run = run_serial);

struct LaplacianResult {
  RayValues values;
  std::vector<bool> stalled;
};

/// grad^2 R / R from the transverse log-amplitude derivatives. Rays whose
/// |p_z| / |p| is below kStallRatio keep `previous` (when given) and are marked
/// stalled; without a previous value such a ray raises LongitudinalStall.
LaplacianResult laplacian_ratio(const WaveFront& front, const LogAmplitudeDerivatives& derivatives,
                                LaplacianProjection projection,
                                const RayValues* previous = nullptr);

/// How grad^2 R / R enters the dynamics of a given regime, in internal units.
struct Coupling {
  Regime regime = Regime::NonRelativistic;
  double epsilon = 0.0;
  double beta2 = 1.0;
  bool eikonal = false;

  /// W per unit of grad^2 R / R: -eps^2 (NR), -eps^2/2 (classical),
  /// -beta2 eps^2 / 2 (relativistic).
  double potential_per_laplacian() const;
};

RayValues wave_potential(const Coupling& coupling, const RayValues& laplacian);

/// -dW/dxi along the oriented tangent, from the same weighted fits as ln R, scaled into a momentum rate for the
/// regime (E/(E-V) included for relativistic waves). The result is orthogonal to
/// each ray's momentum by construction.
void wave_potential_force(const WaveFront& front, const RayValues& potential,
                          const Coupling& coupling, const PotentialField& field, int fit_window,
                          RayValues& drive, RayColumns& force, const RangeRunner& run = run_serial);

/// Sets next.amplitude from the flux law R^2 |p| width = flux_const. Both fronts
/// must carry the same rays in the same order; `next` must have fresh geometry.
/// Raises CausticCollapse when detect_caustic reports a pair.
void transport_amplitude(const WaveFront& prev, WaveFront& next, double min_spacing);

struct CausticReport {
  int index = 0;  // the pair (index, index + 1)
  double spacing = 0.0;
};

/// First neighbour pair whose xi spacing is non-positive or below `min_spacing`,
/// or, given the `previous` front, whose separation measured along the previous
/// tangents reversed during the step. The second test catches a whole front passing through a focus at once,
/// which keeps every spacing positive.
std::optional<CausticReport> detect_caustic(const WaveFront& front, double min_spacing,
                                            const WaveFront* previous = nullptr);

/// max |R^2 |p| width / flux_const - 1| over the front.
double max_flux_deviation(const WaveFront& front);

}  // namespace wavetraj
