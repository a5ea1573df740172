#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "stefan/core.hpp"
#include "stefan/rng.hpp"

namespace stefan {

struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

struct BackwardOptions {
  std::size_t n_paths = 100000;
  RngStream stream;
  double max_step = kInf;
  unsigned workers = 1;
};

/// E^x[w(0-, R_t) 1{τ ∧ τ_r0 > t}] against the reversed boundary s ↦ Λ_{t-s}.
Estimate evaluate_w_backward(const InitialData& init, const Boundary& boundary, double t, double x,
                             const BackwardOptions& options);

/// One backward query per radius; query i uses options.stream.substream(i).
TemperatureField sample_field(const InitialData& init, const Boundary& boundary, double t,
                              std::span<const double> radii, const BackwardOptions& options);

struct ForwardOptions {
  std::size_t n_paths = 1000000;  // per phase
  RngStream stream;
  double max_step = kInf;
  double liquid_cutoff = kInf;    // kInf selects Λ0- + 10 √t
  unsigned workers = 1;
};

struct DensitySlice {
  double time = 0.0;
  std::vector<double> edges;
  std::vector<double> mass;   // ν-mass of surviving paths per bin
  std::vector<double> se;
  double surviving_mass = 0.0;
  double surviving_se = 0.0;
  double initial_mass = 0.0;
};

/// Forward paths from ν-sampled starts, killed at τ⁻ ∧ τ_r0, histogrammed at t.
DensitySlice forward_killed_density(const InitialData& init, const Boundary& boundary, double t,
                                    std::span<const double> edges, const ForwardOptions& options);

struct BinResidual {
  double lo = 0.0, hi = 0.0;
  double backward = 0.0, backward_se = 0.0;
  double forward = 0.0, forward_se = 0.0;
  double residual = 0.0;
  double combined_se = 0.0;
};

/// |∫_bin w(t,x) x^2 dx - forward bin mass| per bin; the backward integral is
/// Simpson's rule on (lo, mid, hi) with shared edge queries.
std::vector<BinResidual> density_identity_residual(const InitialData& init, const Boundary& boundary,
                                                   double t, std::span<const double> edges,
                                                   const BackwardOptions& backward,
                                                   const ForwardOptions& forward);

enum class Side { minus, plus };

/// One-sided derivative of w at the boundary from the quadratic through
/// (Λ, 0) and the nodes nearest to distances h and 2h on the requested side.
double boundary_slope(const TemperatureField& field, double lambda_t, Side side, double h);

struct SlopePair {
  double coarse = 0.0;  // step h
  double fine = 0.0;    // step h/2
  double truncation() const;
};
SlopePair boundary_slope_pair(const TemperatureField& field, double lambda_t, Side side, double h);

/// CSV `bin_lo,bin_hi,mass`.
void write_density_csv(std::ostream& out, const DensitySlice& slice);

}  // namespace stefan
