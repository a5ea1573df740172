#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "stefan/core.hpp"
#include "stefan/rng.hpp"

namespace stefan {

enum class CheckStatus { pass, fail, inconclusive };
const char* check_status_name(CheckStatus status);

struct Check {
  std::string name;
  CheckStatus status = CheckStatus::inconclusive;
  double statistic = 0.0;
  double tolerance = 0.0;
  std::string reference;   // short description of the property checked
};

struct DiagnosticsReport {
  std::vector<Check> checks;

  void add(std::string name, bool pass, double statistic, double tolerance, std::string reference);
  void add_inconclusive(std::string name, double statistic, std::string reference);
  bool all_pass() const;   // inconclusive checks do not fail the report
  nlohmann::json to_json() const;
  void write_table(std::ostream& out) const;
};

struct HolderFit {
  double exponent = 0.0;
  double fit_error = 0.0;        // standard error of the log-log slope
  std::vector<double> lags;
  std::vector<double> moduli;    // max |Λ_t - Λ_s| over pairs at that lag
};

/// Log-log regression of the modulus of continuity over dyadic lags of the
/// nodes in [t_lo, t_hi]. Needs at least 32 nodes there.
HolderFit holder_exponent(const Boundary& boundary, double t_lo, double t_hi);

struct StefanResidualEntry {
  double t = 0.0;
  double lambda_prime = 0.0;
  double wx_minus = 0.0;
  double wx_plus = 0.0;
  double residual = 0.0;          // |Λ' - ½ w_x(Λ-) + ½ w_x(Λ+)|
  double relative = 0.0;          // residual / max(|Λ'|, |½ w_x(Λ-) - ½ w_x(Λ+)|)
};

/// One entry per field. Λ' is the centred difference of the boundary over
/// the neighbouring grid nodes; slopes come from boundary_slope with step h.
std::vector<StefanResidualEntry> stefan_residual(const Boundary& boundary,
                                                 const std::vector<TemperatureField>& fields, double h);

/// Hysteresis default: 4 × the largest standard error in the field.
double default_hysteresis(const TemperatureField& field);

/// Debounced count of direction changes of y ↦ w(t, Λt - y) over the solid
/// nodes in (lo, hi); moves smaller than eps_h against the running direction
/// are ignored.
int monotonicity_changes(const TemperatureField& field, double eps_h, double lo = 0.0, double hi = kInf);

struct PositivityReport {
  bool solid_checked = false;
  std::size_t solid_points = 0;
  double min_solid_z = kInf;       // min over interior solid nodes of w / se
  bool solid_positive = true;
  double max_decay_excess = -kInf; // max over liquid nodes of w - C̄/x - 3 se
  bool decay_ok = true;
  double max_slope_ratio = 0.0;    // max over liquid nodes of (w - 3 se) / (y · slope bound)
  bool slope_ok = true;
  bool pass() const { return solid_positive && decay_ok && slope_ok; }
};

/// Strict positivity in the solid interior beyond 3 s.e., w ≤ C̄/x on the
/// liquid side, and w(t, Λt + y) ≤ 2‖w(0-)‖∞ (1/√(2πt) + 1/Λt) y.
PositivityReport positivity_and_bounds(const std::vector<TemperatureField>& fields, const Boundary& boundary,
                                       const InitialData& init);

struct PowerFit {
  double exponent = 0.0;
  double fit_error = 0.0;
  std::size_t points = 0;
};

/// Log-log fit of w(t, Λt - y) against y over solid nodes with 0 < y ≤ y_max.
PowerFit near_boundary_exponent(const TemperatureField& field, double y_max);

struct InequalityOptions {
  int cone_alpha_points = 41;     // sweep density for the cone-volume expansion
  int cone_delta_points = 41;
  int cone_radius_points = 16;
  std::size_t rotation_triples = 10000;
  int rotation_q_points = 4096;
  std::size_t tail_paths = 200000;
  double quadrature_tol = 1e-8;
  RngStream stream;
  unsigned workers = 1;
};

struct ConeSweep {
  double c_fit = 0.0;             // max of (lhs - rhs) / (Δ α^4) over α, Δ > 0
  double at_alpha = 0.0, at_delta = 0.0, at_radius = 0.0;
  double identity_error = 0.0;    // largest |lhs - rhs| over α = 0 or Δ = 0
};

/// ((R+Δ)^2 - R^2 sin^2 α)^{3/2} - R^3 cos^3 α against
/// (R+Δ)^3 - R^3 - (R^2/4) Δ α^2 over α ∈ [0, 0.1], Δ ∈ [0, 0.05], R ∈ [0.5, 2].
ConeSweep cone_volume_sweep(int alpha_points, int delta_points, int radius_points);

struct RotationCheck {
  std::size_t triples = 0;
  double worst_margin = kInf;     // min of rhs - lhs
  double grid_gap = 0.0;          // largest closed form - grid maximum
  double zero_angle_error = 0.0;
  bool pass = true;
};

/// max over unit q ⊥ v' of q·x ≤ max over unit q ⊥ v of q·x + √2 β |x|, for
/// random x and unit v, v' at angle β ∈ [0, π/2].
RotationCheck rotation_perturbation_check(std::size_t triples, int q_points, const RngStream& stream);

struct QuadratureCase {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool equality = false;          // |lhs - rhs| ≤ tol instead of lhs ≤ rhs + tol
  bool pass = false;
};

/// Gaussian density estimates (four families) evaluated by adaptive quadrature.
std::vector<QuadratureCase> brownian_density_checks(double tol);

/// Every analytic and Monte Carlo inequality check in one report.
DiagnosticsReport inequality_suite(const InequalityOptions& options);

}  // namespace stefan
