#include "stefan/onephase.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "stefan/io.hpp"
#include "stefan/parallel.hpp"

namespace stefan {

namespace {

std::ptrdiff_t find_node(std::span<const double> times, double t) {
  const double tol = 1e-9 * std::max(1.0, times.back());
  const auto it = std::lower_bound(times.begin(), times.end(), t - tol);
  if (it == times.end() || std::abs(*it - t) > tol) return -1;
  return it - times.begin();
}

void add_pair(OrderingReport& r, double lhs, double rhs, double se, double s, double t) {
  ++r.pairs;
  const double margin = lhs - rhs + 3.0 * se;
  if (margin < r.worst_margin) {
    r.worst_margin = margin;
    r.worst_s = s;
    r.worst_t = t;
  }
  if (margin < 0.0) r.pass = false;
}

}  // namespace

void require_valid_subdensity(const PiecewiseProfile& f) {
  const auto segs = f.segments();
  if (segs.empty()) return;
  require(segs.front().lo >= 0.0, ErrorCode::invalid_initial_data, "sub-density must live on [0, inf)");
  require(std::isfinite(segs.back().hi), ErrorCode::invalid_initial_data, "sub-density needs bounded support");
  for (const Segment& s : segs) {
    require(s.kind != SegmentKind::rational_tail, ErrorCode::invalid_initial_data,
            "sub-density pieces must be constant or linear");
    for (double x : {s.lo, s.hi}) {
      const double v = s.value(x);
      require(v >= -1e-15 && v <= 1.0 + 1e-15, ErrorCode::invalid_initial_data,
              "sub-density values must lie in [0, 1]");
    }
  }
}

OnePhaseSolution solve_one_phase(const PiecewiseProfile& density, std::span<const double> grid,
                                 const OnePhaseOptions& o) {
  require_valid_subdensity(density);
  require(grid.size() >= 2 && grid.front() == 0.0, ErrorCode::domain_error, "grid must start at 0");
  for (std::size_t k = 1; k < grid.size(); ++k)
    require(grid[k] > grid[k - 1], ErrorCode::domain_error, "grid must ascend strictly");
  require(o.n_paths > 0 && o.tol > 0.0, ErrorCode::domain_error, "need paths and a positive tolerance");

  OnePhaseSolution sol;
  sol.times.assign(grid.begin(), grid.end());
  sol.density = density;
  const auto segs = density.segments();
  sol.support_width = segs.empty() ? 0.0 : segs.back().hi;
  const std::size_t nodes = grid.size();
  sol.lambda.assign(nodes, 0.0);
  sol.se.assign(nodes, 0.0);
  if (density.is_zero()) {
    sol.converged = true;
    return sol;
  }

  std::vector<double> sq_dt(nodes, 0.0);
  for (std::size_t k = 1; k < nodes; ++k) sq_dt[k] = std::sqrt(grid[k] - grid[k - 1]);
  const std::size_t n = o.n_paths;
  const std::size_t n_chunks = (n + kReductionChunk - 1) / kReductionChunk;
  std::vector<std::vector<double>> sums(n_chunks), squares(n_chunks);

  for (int it = 1; it <= o.max_iterations; ++it) {
    const std::vector<double>& lam = sol.lambda;
    parallel_chunks(n, kReductionChunk, o.workers, [&](std::size_t c, std::size_t begin, std::size_t end) {
      std::vector<double>& s = sums[c];
      std::vector<double>& q = squares[c];
      s.assign(nodes, 0.0);
      q.assign(nodes, 0.0);
      for (std::size_t p = begin; p < end; ++p) {
        double b = 0.0, running = 0.0;
        for (std::size_t k = 1; k < nodes; ++k) {
          const auto step = static_cast<std::uint32_t>(k);
          const double a = b + lam[k - 1];
          b += sq_dt[k] * o.stream.normals(p, step)[0];
          const double e = b + lam[k];
          const double u = o.stream.uniforms(p, step, Purpose::bridge)[0];
          const double dt = sq_dt[k] * sq_dt[k];
          const double m = 0.5 * (a + e + std::sqrt((e - a) * (e - a) - 2.0 * dt * std::log(u)));
          running = std::max(running, m);
          const double v = density.integral(0.0, running);
          s[k] += v;
          q[k] += v * v;
        }
      }
    });
    std::vector<double> next(nodes, 0.0), se(nodes, 0.0);
    std::vector<double> col(n_chunks), col2(n_chunks);
    const double dn = static_cast<double>(n);
    for (std::size_t k = 1; k < nodes; ++k) {
      for (std::size_t c = 0; c < n_chunks; ++c) {
        col[c] = sums[c][k];
        col2[c] = squares[c][k];
      }
      const double mean = pairwise_sum(col) / dn;
      const double var = std::max(0.0, pairwise_sum(col2) / dn - mean * mean);
      next[k] = mean;
      se[k] = std::sqrt(var / dn);
    }
    double change = 0.0;
    for (std::size_t k = 0; k < nodes; ++k) {
      change = std::max(change, std::abs(next[k] - lam[k]));
      if (next[k] < lam[k] - 1e-12) sol.monotone_iterates = false;
    }
    sol.lambda = std::move(next);
    sol.se = std::move(se);
    sol.changes.push_back(change);
    sol.iterations = it;
    if (change < o.tol) {
      sol.converged = true;
      break;
    }
  }
  return sol;
}

OrderingReport subadditivity_check(const OnePhaseSolution& sol) {
  OrderingReport r;
  const auto& t = sol.times;
  for (std::size_t j = 0; j < t.size(); ++j)
    for (std::size_t i = 0; i <= j; ++i) {
      const std::ptrdiff_t d = find_node(t, t[j] - t[i]);
      if (d < 0) continue;
      const auto k = static_cast<std::size_t>(d);
      const double se = std::sqrt(sol.se[i] * sol.se[i] + sol.se[k] * sol.se[k] + sol.se[j] * sol.se[j]);
      add_pair(r, sol.lambda[i] + sol.lambda[k], sol.lambda[j], se, t[i], t[j]);
    }
  return r;
}

ScalingReport scaling_minorization_check(const OnePhaseSolution& sol, double q, const OnePhaseOptions& options) {
  require(q > 0.0 && q <= 1.0, ErrorCode::domain_error, "q must lie in (0, 1]");
  const auto segs = sol.density.segments();
  require(segs.empty() || sol.density.is_non_increasing(0.0, segs.back().hi), ErrorCode::precondition,
          "scaling minorization needs a non-increasing sub-density");
  ScalingReport r;
  const double sq = std::sqrt(q);
  const auto& t = sol.times;
  for (std::size_t j = 0; j < t.size(); ++j) {
    const std::ptrdiff_t d = find_node(t, q * t[j]);
    if (d < 0) continue;
    const auto k = static_cast<std::size_t>(d);
    const double se = std::sqrt(sol.se[k] * sol.se[k] + q * sol.se[j] * sol.se[j]);
    add_pair(r.direct, sol.lambda[k], sq * sol.lambda[j], se, t[j], q * t[j]);
  }
  const OnePhaseSolution mu = solve_one_phase(sol.density.scaled_argument(sq), t, options);
  for (std::size_t j = 0; j < t.size(); ++j) {
    const double se = sq * std::sqrt(mu.se[j] * mu.se[j] + sol.se[j] * sol.se[j]);
    add_pair(r.companion, sq * mu.lambda[j], sq * sol.lambda[j], se, t[j], q * t[j]);
  }
  r.pass = r.direct.pass && r.companion.pass;
  return r;
}

void write_one_phase_csv(std::ostream& out, const OnePhaseSolution& sol) {
  out << "t,lambda\n";
  for (std::size_t k = 0; k < sol.times.size(); ++k)
    out << format_double(sol.times[k]) << ',' << format_double(sol.lambda[k]) << '\n';
}

}  // namespace stefan
