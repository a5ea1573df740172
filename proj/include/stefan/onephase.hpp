#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "stefan/core.hpp"
#include "stefan/rng.hpp"

namespace stefan {

struct OnePhaseOptions {
  std::size_t n_paths = 100000;
  RngStream stream;
  double tol = 1e-7;
  int max_iterations = 200;
  unsigned workers = 1;
};

/// λ_s = E[F(sup_{s'≤s}(B_{s'} + λ_{s'}))] with F(m) = ∫_0^m f̲, solved by
/// Picard iteration from λ ≡ 0 on frozen Brownian paths.
struct OnePhaseSolution {
  std::vector<double> times;
  std::vector<double> lambda;
  std::vector<double> se;
  PiecewiseProfile density;
  double support_width = 0.0;   // ε₂
  int iterations = 0;
  bool converged = false;
  bool monotone_iterates = true;
  std::vector<double> changes;
};

/// f̲ must take values in [0, 1] on a bounded support starting at 0.
void require_valid_subdensity(const PiecewiseProfile& density);

OnePhaseSolution solve_one_phase(const PiecewiseProfile& density, std::span<const double> grid,
                                 const OnePhaseOptions& options);

struct OrderingReport {
  std::size_t pairs = 0;
  double worst_margin = kInf;   // min over pairs of lhs - rhs + 3 s.e.
  double worst_s = 0.0, worst_t = 0.0;
  bool pass = true;
};

/// λ_s + λ_{t-s} ≥ λ_t - 3 s.e. over all grid pairs with t - s on the grid.
OrderingReport subadditivity_check(const OnePhaseSolution& sol);

struct ScalingReport {
  OrderingReport direct;      // λ_{qs} vs √q λ_s where qs is a grid node
  OrderingReport companion;   // √q μ_s vs √q λ_s, μ solving the problem for f̲(√q ·)
  bool pass = true;
};

/// Requires f̲ non-increasing. The companion solve reuses the stream of
/// `options` so both solutions see the same paths.
ScalingReport scaling_minorization_check(const OnePhaseSolution& sol, double q, const OnePhaseOptions& options);

/// CSV `t,lambda`.
void write_one_phase_csv(std::ostream& out, const OnePhaseSolution& sol);

}  // namespace stefan
