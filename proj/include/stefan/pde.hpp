#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "stefan/core.hpp"

namespace stefan {

/// v = x·w on two uniform grids: solid [r0, front], liquid [front, x_max].
/// Endpoint values are the homogeneous Dirichlet data and stay 0.
struct FrontTrackedState {
  double time = 0.0;
  double front = 0.0;
  double r0 = 0.0;
  double x_max = 0.0;
  std::vector<double> solid_v;
  std::vector<double> liquid_v;

  double solid_dx() const;
  double liquid_dx() const;
  double solid_x(std::size_t i) const;
  double liquid_x(std::size_t i) const;
  /// w on the union of both grids, the front node appearing once with w = 0.
  TemperatureField field() const;
};

/// x_max = Λ0- + 8 √horizon.
double default_x_max(const InitialData& init, double horizon);

/// Samples w(0-,·) on grids of spacing at most dx. The profile must be
/// continuous at Λ0-.
FrontTrackedState initial_state(const InitialData& init, double dx, double x_max);

struct StepOptions {
  bool stefan = true;            // false keeps the front fixed
  double blowup_thresh = 1e3;    // |Λ'| above this flags a blow-up
};

struct StepInfo {
  double wx_minus = 0.0;         // ∂x w(Λ-) before the step
  double wx_plus = 0.0;          // ∂x w(Λ+) before the step
  double velocity = 0.0;
  bool blowup = false;
  bool zeta = false;             // front would come within two cells of r0
  bool remap_warning = false;    // Δt > Δx^2 on either grid
};

/// One-sided second-order slopes of w at the front.
std::pair<double, double> front_slopes(const FrontTrackedState& state);

/// Crank–Nicolson on both phases, explicit front update from the slopes at
/// the start of the step, PCHIP remap onto the new front. A blow-up or ζ
/// event leaves the state unchanged.
FrontTrackedState pde_step(const FrontTrackedState& state, double dt, const StepOptions& options = {},
                           StepInfo* info = nullptr);

struct FluxRecord {
  double t = 0.0;
  double lambda = 0.0;
  double wx_minus = 0.0;
  double wx_plus = 0.0;
};

struct PdeOptions {
  double dt = 0.0;                      // 0 selects Δx^2
  double dx = 1e-3;
  double x_max = kInf;                  // kInf selects default_x_max
  std::vector<double> snapshot_times;
  bool stefan = true;
  double blowup_thresh = 1e3;
};

struct PdeResult {
  Boundary boundary;                    // one node per step
  std::vector<TemperatureField> snapshots;
  std::vector<FluxRecord> fluxes;       // state at every node, including the last
  std::optional<double> blowup_time;
  bool remap_warning = false;
  bool monotone = true;
  double dt = 0.0;
  double x_max = 0.0;
};

PdeResult pde_solve(const InitialData& init, double horizon, const PdeOptions& options);

/// |Δ(Λ^3/3) - Δt·(g_k + g_{k+1})/2| with g = (Λ^2/2)(∂x w(Λ-) - ∂x w(Λ+)).
std::vector<double> mass_balance_residual(const std::vector<FluxRecord>& fluxes);

/// CSV `t,x,w,phase`.
void write_snapshots_csv(std::ostream& out, const std::vector<TemperatureField>& snapshots);

}  // namespace stefan
