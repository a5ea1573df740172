#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "stefan/core.hpp"
#include "stefan/rng.hpp"

namespace stefan {

struct GammaOptions {
  std::size_t n_paths = 100000;  // per phase
  RngStream stream;              // solid starts use substream(0), liquid substream(1)
  double max_step = kInf;        // barrier intervals longer than this are subdivided
  double liquid_cutoff = kInf;   // upper end of liquid starts; kInf selects the default rule
  unsigned workers = 1;
};

/// Λ0- + 10 √T. Starts beyond this cannot reach the boundary by T except with
/// probability below 2Φ(-10).
double default_liquid_cutoff(const InitialData& init, double horizon);

struct GammaResult {
  Boundary boundary;            // Γ[λ]
  std::vector<double> solid;    // Γ+ per node
  std::vector<double> liquid;   // Γ- per node
  std::vector<double> solid_se;
  std::vector<double> liquid_se;
  double zeta = kInf;
  double solid_mass = 0.0;      // ν-mass of the solid starts simulated
  double liquid_mass = 0.0;
  double jump_mass = 0.0;       // ν-mass in (λ0, Λ0-) that is absorbed at t = 0

  double volume_se(std::size_t k) const;
  /// Standard error of Γ[λ] at node k via d(Λ^3/3) = Λ^2 dΛ.
  double boundary_se(std::size_t k) const;
};

/// The boundary generated by the trial boundary λ. Starts in (λ0, Λ0-) are
/// crossed at time 0 and contribute their exact ν-mass.
GammaResult evaluate_gamma(const InitialData& init, const Boundary& lambda, const GammaOptions& options);

struct JumpOptions {
  double jump_tol = 0.0;        // D(y) must exceed this to count as strictly positive
  double bisection_tol = 1e-9;
  double max_spacing = kInf;    // largest admissible field spacing below Λt-
};

struct JumpResult {
  double size = 0.0;
  bool down = false;
  double bracket_lo = 0.0, bracket_hi = 0.0;
  double residual = 0.0;        // D(size) - jump_tol
  double liquid_size = 0.0;     // upward part, 0 for admissible data
  bool reaches_core = false;    // D never became positive: melt down to r0
};

/// Smallest y with ∫_{Λ-y}^{Λ} (1 - w) x^2 dx > jump_tol, or 0 if that holds
/// throughout the first field cell.
JumpResult compute_jump(const TemperatureField& field, double lambda_left, double r0,
                        const JumpOptions& options = {});

struct ZetaResult {
  double zeta = kInf;
  std::optional<bool> physical_at_zeta;
  double max_deficit = 0.0;     // max_y D(y) on (0, Λζ- - r0) when evaluated
};

/// First time the interpolated boundary reaches r0. When finite and a field
/// at ζ- is supplied, reports whether ∫ x^2 <= ∫ w x^2 on every (Λζ- - y, Λζ-).
ZetaResult detect_zeta(const Boundary& boundary, double r0, const TemperatureField* field_at_zeta = nullptr);

struct JumpEvent {
  double t = 0.0;
  double size = 0.0;
};

struct FixedPointOptions {
  GammaOptions gamma;
  double tol = 1e-7;
  int max_iterations = 100;
  double jump_tol_rel = 1e-10;              // jump_tol = jump_tol_rel · Λ0-^3
  double jump_grid_h = 1e-3;                // spacing of the exact w(0-) field used for the t = 0 jump
  double blowup_rate = 1e3;                 // |ΔΛ|/Δt above this is reported as a jump event
  std::optional<Boundary> initial_iterate;  // replaces Λ0 ≡ Λ0 (post jump)
  bool keep_history = false;
};

struct FixedPointResult {
  Boundary boundary;
  GammaResult last_gamma;
  int iterations = 0;
  bool converged = false;
  bool monotone_iterates = true;  // Λ^{n+1} <= Λ^n at every node and n
  std::vector<double> changes;    // sup-norm change per iteration
  std::vector<JumpEvent> jump_events;
  double initial_jump = 0.0;
  std::vector<Boundary> history;

  std::vector<double> boundary_se() const;
};

FixedPointResult fixed_point_solve(const InitialData& init, std::span<const double> grid,
                                   const FixedPointOptions& options);

struct GrowthResidual {
  std::vector<double> times;
  std::vector<double> residual;
  std::vector<double> se;
  std::vector<double> lhs;   // Λ_start^3/3 - Λ_t^3/3
  std::vector<double> rhs;   // Γ+ + Γ-

  /// max_k residual_k / (se_k + slack); <= 3 passes the usual criterion.
  double worst_ratio(double slack = 0.0) const;
};

/// |Λ0-^3/3 - Λ_t^3/3 - (Γ+_t + Γ-_t)| with the stream in `options` (use fresh numbers).
GrowthResidual growth_residual(const InitialData& init, const Boundary& boundary, const GammaOptions& options);

/// Same identity restarted at node k0 from w(t_k0, ·). The field's standard
/// errors are propagated into `se`.
GrowthResidual restart_residual(const InitialData& init, const Boundary& boundary, std::size_t k0,
                                const TemperatureField& field_t0, const GammaOptions& options);

}  // namespace stefan
