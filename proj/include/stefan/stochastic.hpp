#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "stefan/core.hpp"
#include "stefan/rng.hpp"

namespace stefan {

inline constexpr double kNone = std::numeric_limits<double>::quiet_NaN();

double normal_cdf(double x);

/// Cartesian position of a 3D Brownian motion; R is its norm.
struct PathState {
  std::array<double, 3> pos{0.0, 0.0, 0.0};
  double radius() const;
  static PathState at_radius(double r) { return PathState{{r, 0.0, 0.0}}; }
};

/// Exact-in-law update over dt using the (path, step) normal block.
PathState advance_path(const PathState& state, double dt, const RngStream& rng,
                       std::uint64_t path, std::uint32_t step);

/// P(min of a Brownian bridge a -> b over dt <= level).
double bridge_min_crossing_prob(double a, double b, double level, double dt);
/// P(max of a Brownian bridge a -> b over dt >= level), by reflection.
double bridge_max_crossing_prob(double a, double b, double level, double dt);
/// Same for the radial part of a 3D Brownian bridge (h-transform of the killed bridge).
double bessel_bridge_min_crossing_prob(double a, double b, double level, double dt);

/// P^x(min_{s<=t} R_s <= b) for the 3D Bessel process, 0 < b < x.
double hit_const_level_prob(double x, double b, double t);

/// Piecewise-linear barrier in path time. Consecutive knots at equal times
/// encode a jump of the barrier.
struct BarrierSchedule {
  std::vector<double> s;
  std::vector<double> level;
  /// Level fixing the crossing direction: a path is "solid" if R0 < reference.
  double reference = 0.0;

  double horizon() const { return s.empty() ? 0.0 : s.back(); }
};

/// Λ on [0, horizon] with the 0- knot first; intervals longer than max_step are subdivided.
BarrierSchedule forward_schedule(const Boundary& boundary, double horizon, double max_step);
/// s ↦ Λ_{t-s} on [0, t], ending with the jump to the Λ0- extension when Λ0- ≠ Λ0.
BarrierSchedule reversed_schedule(const Boundary& boundary, double t, double max_step);
BarrierSchedule constant_schedule(double level, double horizon, double max_step);

struct HittingRecord {
  double tau = kNone;     // first phase-appropriate crossing of the barrier
  double tau_r0 = kNone;  // first hit of r0
  double weight = 1.0;    // product of bridge non-crossing probabilities up to the stop
  double final_radius = 0.0;
  Phase origin = Phase::solid;

  bool crossed() const { return tau == tau; }
  bool hit_r0() const { return tau_r0 == tau_r0; }
  bool survived() const { return !crossed() && !hit_r0(); }
};

struct PathBatch {
  std::vector<double> start_radii;
  RngStream stream;
  std::uint64_t path_offset = 0;  // global index of start_radii[0]
};

struct CrossingOptions {
  unsigned workers = 1;
  /// Stop at the first of the two events. When false, r0 is still tracked after
  /// the barrier crossing.
  bool stop_at_first_event = true;
  /// Kill at r0. Disable for liquid paths when following the uncapped formula.
  bool track_r0 = true;
};

/// Simulates every path of the batch against the barrier and r0.
std::vector<HittingRecord> first_crossing(const PathBatch& batch, const BarrierSchedule& barrier,
                                          double r0, const CrossingOptions& options = {});

/// Single path; exposed for callers that reduce on the fly.
HittingRecord simulate_path(double x0, const BarrierSchedule& barrier, double r0,
                            const RngStream& rng, std::uint64_t path, bool stop_at_first_event = true,
                            bool track_r0 = true);

struct TailBoundReport {
  double x = 0.0, a = 0.0, t = 0.0;
  std::size_t n_paths = 0;
  double p_min = 0.0, p_min_se = 0.0, bound_min = 0.0;
  double p_dev = 0.0, p_dev_se = 0.0, bound_dev = 0.0;
  bool pass = false;
};

/// MC estimates of P^x(min R <= x - a) and P^x(max |R - x| >= a) against
/// 2Φ(-a/√t) and 12Φ(-a/√(3t)).
TailBoundReport tail_bound_check(double x, double a, double t, std::size_t n_paths,
                                 const RngStream& stream, unsigned workers = 1,
                                 std::size_t steps = 64);

/// Little-endian dump: per record f64 tau, f64 tau_r0, f64 weight, u8 phase.
/// Missing times are written as NaN.
void write_hitting_records(std::ostream& out, std::span<const HittingRecord> records);

}  // namespace stefan
