#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stefan/error.hpp"
#include "stefan/rng.hpp"

namespace stefan {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Phase of a path relative to the boundary at launch.
enum class Phase : std::uint8_t { solid = 0, liquid = 1 };

enum class SegmentKind { constant, linear, rational_tail };

/// One piece of a piecewise profile on [lo, hi).
///   constant:      w = c0
///   linear:        w = c0 + c1 x
///   rational_tail: w = c0 (x - anchor) / x^2
struct Segment {
  double lo = 0.0;
  double hi = 0.0;  // may be +inf
  SegmentKind kind = SegmentKind::constant;
  double c0 = 0.0;
  double c1 = 0.0;
  double anchor = 0.0;

  double value(double x) const;
  double derivative(double x) const;
  /// ∫_a^b w(x) x^2 dx for [a, b] inside the segment.
  double nu_mass(double a, double b) const;
  /// ∫_a^b w(x) dx.
  double plain_mass(double a, double b) const;
};

/// Piecewise profile, zero outside its segments. Segments are sorted and
/// non-overlapping; gaps are allowed.
class PiecewiseProfile {
 public:
  PiecewiseProfile() = default;
  explicit PiecewiseProfile(std::vector<Segment> segments);

  static PiecewiseProfile constant(double lo, double hi, double c);
  /// Linear interpolation through (xs[i], ws[i]); repeated abscissae encode
  /// discontinuities.
  static PiecewiseProfile interpolate(std::span<const double> xs, std::span<const double> ws);

  double operator()(double x) const;
  std::span<const Segment> segments() const { return segments_; }
  bool is_zero() const;

  double nu_integral(double lo, double hi) const;
  double integral(double lo, double hi) const;

  /// sup |w| over [lo, hi].
  double sup(double lo = 0.0, double hi = kInf) const;
  /// sup of w(x)·x over [lo, hi].
  double sup_times_x(double lo, double hi) const;

  PiecewiseProfile restricted(double lo, double hi) const;
  /// The profile x ↦ w(factor·x).
  PiecewiseProfile scaled_argument(double factor) const;

  /// Exact number of monotonicity changes on [lo, hi]; jumps count as
  /// monotone pieces in the jump direction, flat pieces are ignored.
  int monotonicity_changes(double lo, double hi) const;
  bool is_non_increasing(double lo, double hi) const;

 private:
  std::vector<Segment> segments_;
};

/// ∫_lo^hi weight(x) x^2 dx.
double nu_integral(double lo, double hi, const PiecewiseProfile& weight);
double nu_integral(double lo, double hi, double weight);

struct InitialData {
  double r0 = 1.0;
  double lambda0minus = 2.0;
  double gamma = 1.0;
  double growth_constant = 0.0;  // C in the tail bound w ≤ C (x - Λ0-) x^-2
  PiecewiseProfile profile;

  /// Constant C̄ with w(0-, x) ≤ C̄ / x on the liquid side.
  double decay_constant() const;
  double sup_norm() const;
};

struct ValidationIssue {
  std::string clause;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  int solid_monotonicity_changes = 0;
  bool ok() const { return issues.empty(); }
  bool violates(const std::string& clause) const;
};

ValidationReport validate_initial_data(const InitialData& data);
/// Throws invalid_initial_data listing every violated clause.
void require_valid(const InitialData& data);

double w_to_temperature(double w, double x, double gamma);
double temperature_to_w(double temperature, double x, double gamma);

/// Inverse-CDF sampler for the density w(x) x^2 / m on [lo, hi].
class ProfileSampler {
 public:
  ProfileSampler(const PiecewiseProfile& profile, double lo, double hi);
  double mass() const { return mass_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  /// u_segment selects the piece, u_within inverts its CDF.
  double sample(double u_segment, double u_within) const;

 private:
  std::vector<Segment> pieces_;
  std::vector<double> cumulative_;  // normalized, cumulative_.back() == 1
  double mass_ = 0.0;
  double lo_ = 0.0;
  double hi_ = 0.0;
};

struct ProfileSample {
  std::vector<double> positions;
  double mass = 0.0;
};

/// Support of a phase: solid (r0, Λ0-), liquid (Λ0-, cutoff).
std::pair<double, double> phase_support(const InitialData& data, Phase phase,
                                        double liquid_cutoff = kInf);

/// n i.i.d. draws from w(0-,x) x^2 / m on the phase support. Sample i uses
/// the (i, 0, start) block of `stream`.
ProfileSample sample_from_profile(const InitialData& data, Phase phase, std::size_t count,
                                  const RngStream& stream, double liquid_cutoff = kInf);

/// Right-continuous free boundary on a time grid. Between nodes the value is
/// the linear interpolant from values[k] to left_limits[k+1]. Node 0 has left
/// limit Λ0- by convention.
struct Boundary {
  std::vector<double> times;
  std::vector<double> values;
  std::vector<double> left_limits;
  double lambda0minus = 0.0;
  double zeta = kInf;

  static Boundary constant(std::span<const double> times, double value, double lambda0minus);
  static Boundary from_values(std::span<const double> times, std::span<const double> values,
                              double lambda0minus);

  std::size_t size() const { return times.size(); }
  double horizon() const { return times.empty() ? 0.0 : times.back(); }
  double at(double t) const;
  double left_limit_at(double t) const;
  bool has_jump(std::size_t k) const { return left_limits[k] != values[k]; }

  /// Violated invariants; empty when the boundary is admissible.
  std::vector<std::string> check(double r0) const;
};

std::vector<double> uniform_grid(double t0, double t1, std::size_t nodes);

enum class NodePhase : std::uint8_t { solid, interface, liquid };
const char* node_phase_name(NodePhase phase);

/// w(t, ·) on radial nodes. Radii are non-decreasing; a repeated radius
/// represents a discontinuity (left value first).
struct TemperatureField {
  double time = 0.0;
  double boundary = 0.0;
  std::vector<double> radii;
  std::vector<double> values;
  std::vector<double> std_errors;  // empty for exact fields
  std::vector<NodePhase> phases;

  void tag_phases(double lambda_t);
  /// Piecewise-linear reading of the field; 0 outside the node range.
  PiecewiseProfile as_profile() const;
};

/// Exact nodal picture of a profile on [lo, hi]: nodes at every breakpoint,
/// doubled at discontinuities; curved pieces refined to max_spacing.
TemperatureField field_from_profile(const PiecewiseProfile& profile, double lo, double hi,
                                    double max_spacing);

}  // namespace stefan
