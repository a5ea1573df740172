#include "stefan/growth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "stefan/parallel.hpp"
#include "stefan/stochastic.hpp"

namespace stefan {

namespace {

double cube(double x) { return x * x * x; }

struct VolumeEstimate {
  std::vector<double> volume;  // per node
  std::vector<double> se;
  double mass = 0.0;
  // hit fraction per (cell, node) for starts inside each cell of `cell_edges`
  std::vector<std::vector<double>> cell_fraction;
};

// ν-weighted volume of starts in (lo, hi) whose barrier crossing happens by each
// node time (and before r0 when track_r0 is set).
VolumeEstimate hit_volume(const PiecewiseProfile& profile, double lo, double hi, std::size_t n,
                          const RngStream& stream, const BarrierSchedule& barrier,
                          std::span<const double> node_times, double r0, bool track_r0,
                          unsigned workers, std::span<const double> cell_edges = {}) {
  const std::size_t n_nodes = node_times.size();
  VolumeEstimate out;
  out.volume.assign(n_nodes, 0.0);
  out.se.assign(n_nodes, 0.0);
  if (!(lo < hi) || n == 0) return out;
  const double mass = profile.nu_integral(lo, hi);
  if (!(mass > 0.0)) return out;
  const ProfileSampler sampler(profile, lo, hi);
  out.mass = sampler.mass();

  const std::size_t n_cells = cell_edges.empty() ? 0 : cell_edges.size() - 1;
  const std::size_t n_chunks = (n + kReductionChunk - 1) / kReductionChunk;
  std::vector<std::vector<std::uint32_t>> hist(n_chunks);
  std::vector<std::vector<std::uint32_t>> cell_hist(n_chunks);
  std::vector<std::vector<std::uint32_t>> cell_starts(n_chunks);

  parallel_chunks(n, kReductionChunk, workers, [&](std::size_t c, std::size_t begin, std::size_t end) {
    auto& h = hist[c];
    h.assign(n_nodes, 0);
    if (n_cells) {
      cell_hist[c].assign(n_cells * n_nodes, 0);
      cell_starts[c].assign(n_cells, 0);
    }
    for (std::size_t i = begin; i < end; ++i) {
      const auto u = stream.uniforms53(i, 0, Purpose::start);
      const double x0 = sampler.sample(u[0], u[1]);
      const HittingRecord rec = simulate_path(x0, barrier, r0, stream, i, true, track_r0);
      std::size_t cell = 0;
      if (n_cells) {
        cell = static_cast<std::size_t>(std::upper_bound(cell_edges.begin(), cell_edges.end(), x0) -
                                        cell_edges.begin());
        cell = std::clamp<std::size_t>(cell, 1, n_cells) - 1;
        ++cell_starts[c][cell];
      }
      if (!rec.crossed()) continue;
      if (rec.hit_r0() && rec.tau_r0 < rec.tau) continue;
      const auto k = static_cast<std::size_t>(
          std::lower_bound(node_times.begin(), node_times.end(), rec.tau) - node_times.begin());
      if (k >= n_nodes) continue;
      ++h[k];
      if (n_cells) ++cell_hist[c][cell * n_nodes + k];
    }
  });

  std::vector<std::uint64_t> counts(n_nodes, 0);
  for (const auto& h : hist)
    for (std::size_t k = 0; k < n_nodes; ++k) counts[k] += h[k];
  const double dn = static_cast<double>(n);
  std::uint64_t cum = 0;
  for (std::size_t k = 0; k < n_nodes; ++k) {
    cum += counts[k];
    const double p = static_cast<double>(cum) / dn;
    out.volume[k] = out.mass * p;
    out.se[k] = out.mass * std::sqrt(p * (1.0 - p) / dn);
  }
  if (n_cells) {
    std::vector<std::uint64_t> starts(n_cells, 0), hits(n_cells * n_nodes, 0);
    for (std::size_t c = 0; c < n_chunks; ++c) {
      for (std::size_t j = 0; j < n_cells; ++j) starts[j] += cell_starts[c][j];
      for (std::size_t j = 0; j < n_cells * n_nodes; ++j) hits[j] += cell_hist[c][j];
    }
    out.cell_fraction.assign(n_cells, std::vector<double>(n_nodes, 0.0));
    for (std::size_t j = 0; j < n_cells; ++j) {
      std::uint64_t acc = 0;
      for (std::size_t k = 0; k < n_nodes; ++k) {
        acc += hits[j * n_nodes + k];
        out.cell_fraction[j][k] = starts[j] ? static_cast<double>(acc) / static_cast<double>(starts[j]) : 0.0;
      }
    }
  }
  return out;
}

double max_step_for(const GammaOptions& o) { return o.max_step > 0.0 ? o.max_step : kInf; }

// D(y) = ∫_{Λ-y}^{Λ} (1 - w) x^2 dx over a piecewise-linear field, marched downward.
class DeficitMarch {
 public:
  struct Cell {
    double a, b;       // a < b, b closer to Λ
    double alpha, beta;  // 1 - w(x) = alpha + beta x
    double d_top;      // D at y = Λ - b
  };

  DeficitMarch(const TemperatureField& f, double lambda, double r0) : lambda_(lambda) {
    // cells strictly inside [r0, Λ], ordered from Λ downward
    const auto& x = f.radii;
    const auto& w = f.values;
    std::vector<Cell> up;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
      double a = x[i], b = x[i + 1], wa = w[i], wb = w[i + 1];
      if (!(b > a)) continue;
      if (b <= r0 || a >= lambda) continue;
      const double slope = (wb - wa) / (b - a);
      if (a < r0) {
        wa += slope * (r0 - a);
        a = r0;
      }
      if (b > lambda) {
        wb = wa + slope * (lambda - a);
        b = lambda;
      }
      const double beta = -slope;
      const double alpha = 1.0 - wa - beta * a;
      up.push_back({a, b, alpha, beta, 0.0});
    }
    cells_.assign(up.rbegin(), up.rend());
    double d = 0.0;
    for (auto& c : cells_) {
      c.d_top = d;
      d += segment(c, c.a);
    }
  }

  const std::vector<Cell>& cells() const { return cells_; }
  double lambda() const { return lambda_; }

  // ∫_x^b (alpha + beta s) s^2 ds
  static double segment(const Cell& c, double x) {
    return c.alpha * (cube(c.b) - cube(x)) / 3.0 + c.beta * (cube(c.b) * c.b - cube(x) * x) / 4.0;
  }
  static double integrand(const Cell& c, double x) { return c.alpha + c.beta * x; }

  double D(std::size_t cell, double y) const {
    const Cell& c = cells_[cell];
    return c.d_top + segment(c, lambda_ - y);
  }

 private:
  double lambda_;
  std::vector<Cell> cells_;
};

}  // namespace

double default_liquid_cutoff(const InitialData& init, double horizon) {
  return init.lambda0minus + 10.0 * std::sqrt(std::max(horizon, 0.0));
}

double GammaResult::volume_se(std::size_t k) const {
  return std::sqrt(solid_se[k] * solid_se[k] + liquid_se[k] * liquid_se[k]);
}

double GammaResult::boundary_se(std::size_t k) const {
  const double l = boundary.values[k];
  return volume_se(k) / (l * l);
}

GammaResult evaluate_gamma(const InitialData& init, const Boundary& lambda, const GammaOptions& o) {
  require(lambda.size() >= 1, ErrorCode::domain_error, "trial boundary has no nodes");
  for (std::size_t k = 0; k < lambda.size(); ++k) {
    require(lambda.values[k] >= init.r0, ErrorCode::domain_error, "trial boundary below r0");
    if (k > 0)
      require(lambda.left_limits[k] <= lambda.values[k - 1] && lambda.values[k] <= lambda.left_limits[k],
              ErrorCode::domain_error, "trial boundary must be non-increasing");
  }
  const double L = init.lambda0minus;
  const double T = lambda.horizon();
  const std::span<const double> times(lambda.times);
  const std::size_t n_nodes = lambda.size();
  const BarrierSchedule barrier = forward_schedule(lambda, T, max_step_for(o));

  GammaResult res;
  const double lam0 = std::min(lambda.values[0], L);
  res.jump_mass = init.profile.nu_integral(lam0, L);
  const auto solid = hit_volume(init.profile, init.r0, lam0, o.n_paths, o.stream.substream(0), barrier,
                                times, init.r0, true, o.workers);
  const double cutoff = std::isinf(o.liquid_cutoff) ? default_liquid_cutoff(init, T) : o.liquid_cutoff;
  // the liquid integral is not capped at r0
  const auto liquid = hit_volume(init.profile, L, cutoff, o.n_paths, o.stream.substream(1), barrier,
                                 times, init.r0, false, o.workers);
  res.solid_mass = solid.mass;
  res.liquid_mass = liquid.mass;
  res.solid.resize(n_nodes);
  res.liquid = liquid.volume;
  res.solid_se = solid.se;
  res.liquid_se = liquid.se;
  std::vector<double> values(n_nodes);
  const double r0c = cube(init.r0);
  for (std::size_t k = 0; k < n_nodes; ++k) {
    res.solid[k] = res.jump_mass + solid.volume[k];
    const double arg = cube(L) - 3.0 * (res.solid[k] + res.liquid[k]);
    if (arg <= r0c) {
      values[k] = init.r0;
      if (std::isinf(res.zeta)) res.zeta = times[k];
    } else {
      values[k] = std::cbrt(arg);
    }
  }
  res.boundary = Boundary::from_values(times, values, L);
  res.boundary.zeta = res.zeta;
  return res;
}

JumpResult compute_jump(const TemperatureField& field, double lambda_left, double r0, const JumpOptions& o) {
  require(lambda_left > r0, ErrorCode::domain_error, "boundary must lie above r0");
  require(field.radii.size() == field.values.size() && field.radii.size() >= 2, ErrorCode::coverage,
          "field needs at least two nodes");
  const double cover_tol = 1e-9 * lambda_left;
  require(field.radii.front() <= r0 + cover_tol && field.radii.back() >= lambda_left - cover_tol,
          ErrorCode::coverage, "field does not cover (r0, lambda)");
  for (std::size_t i = 0; i + 1 < field.radii.size(); ++i) {
    const double a = field.radii[i], b = field.radii[i + 1];
    require(b >= a, ErrorCode::coverage, "field radii must be non-decreasing");
    if (b > r0 && a < lambda_left)
      require(b - a <= o.max_spacing * (1.0 + 1e-9), ErrorCode::coverage,
              "field spacing exceeds the jump grid spacing");
  }

  JumpResult res;
  // liquid side: ∫ x^2 > -∫ w x^2 for any y > 0 whenever w(Λ+) > -1
  {
    const auto it = std::upper_bound(field.radii.begin(), field.radii.end(), lambda_left);
    const double w_plus = it == field.radii.end() ? 0.0 : field.values[static_cast<std::size_t>(it - field.radii.begin())];
    require(w_plus > -1.0, ErrorCode::precondition, "liquid side admits an upward jump");
    res.liquid_size = 0.0;
  }

  const DeficitMarch march(field, lambda_left, r0);
  const auto& cells = march.cells();
  res.bracket_hi = 0.0;
  if (cells.empty()) return res;

  {
    // strictly positive on the whole first cell: no jump
    const auto& c = cells.front();
    const double g_top = DeficitMarch::integrand(c, c.b), g_bot = DeficitMarch::integrand(c, c.a);
    const double d_end = march.D(0, lambda_left - c.a);
    if ((g_top > 0.0 || (g_top == 0.0 && g_bot > 0.0)) && d_end > 0.0) return res;
  }

  const double tol = o.jump_tol;
  for (std::size_t j = 0; j < cells.size(); ++j) {
    const auto& c = cells[j];
    std::vector<double> ys{lambda_left - c.b};
    if (c.beta != 0.0) {
      const double xc = -c.alpha / c.beta;
      if (xc > c.a && xc < c.b) ys.push_back(lambda_left - xc);
    }
    ys.push_back(lambda_left - c.a);
    for (std::size_t s = 0; s + 1 < ys.size(); ++s) {
      double lo = ys[s], hi = ys[s + 1];
      if (!(march.D(j, lo) <= tol && march.D(j, hi) > tol)) continue;
      while (hi - lo > o.bisection_tol) {
        const double mid = 0.5 * (lo + hi);
        if (march.D(j, mid) > tol) hi = mid; else lo = mid;
      }
      res.size = hi;
      res.down = hi > 0.0;
      res.bracket_lo = lo;
      res.bracket_hi = hi;
      res.residual = march.D(j, hi) - tol;
      return res;
    }
  }
  res.size = lambda_left - r0;
  res.down = true;
  res.reaches_core = true;
  res.bracket_lo = res.bracket_hi = res.size;
  return res;
}

ZetaResult detect_zeta(const Boundary& b, double r0, const TemperatureField* field) {
  ZetaResult res;
  double left_at_zeta = 0.0;
  if (b.values[0] <= r0) {
    res.zeta = b.times[0];
    left_at_zeta = b.left_limits[0];
  } else {
    for (std::size_t k = 0; k + 1 < b.size(); ++k) {
      const double v0 = b.values[k], v1 = b.left_limits[k + 1];
      if (v1 <= r0) {
        res.zeta = b.times[k] + (v0 - r0) / (v0 - v1) * (b.times[k + 1] - b.times[k]);
        left_at_zeta = r0;
        break;
      }
      if (b.values[k + 1] <= r0) {
        res.zeta = b.times[k + 1];
        left_at_zeta = b.left_limits[k + 1];
        break;
      }
    }
  }
  if (std::isfinite(res.zeta) && field && left_at_zeta > r0) {
    const DeficitMarch march(*field, left_at_zeta, r0);
    double worst = 0.0;
    for (std::size_t j = 0; j < march.cells().size(); ++j) {
      const auto& c = march.cells()[j];
      worst = std::max({worst, march.D(j, left_at_zeta - c.a), march.D(j, left_at_zeta - c.b)});
      if (c.beta != 0.0) {
        const double xc = -c.alpha / c.beta;
        if (xc > c.a && xc < c.b) worst = std::max(worst, march.D(j, left_at_zeta - xc));
      }
    }
    res.max_deficit = worst;
    res.physical_at_zeta = worst <= 1e-12 * cube(left_at_zeta);
  }
  return res;
}

std::vector<double> FixedPointResult::boundary_se() const {
  std::vector<double> se(boundary.size(), 0.0);
  if (last_gamma.solid_se.size() != se.size()) return se;
  for (std::size_t k = 0; k < se.size(); ++k) se[k] = last_gamma.boundary_se(k);
  return se;
}

FixedPointResult fixed_point_solve(const InitialData& init, std::span<const double> grid,
                                   const FixedPointOptions& o) {
  require_valid(init);
  require(grid.size() >= 2 && grid.front() == 0.0, ErrorCode::domain_error,
          "time grid must start at 0 and have at least two nodes");
  const double L = init.lambda0minus;
  FixedPointResult res;

  const TemperatureField w0 = field_from_profile(init.profile, init.r0, L, o.jump_grid_h);
  JumpOptions jo;
  jo.jump_tol = o.jump_tol_rel * cube(L);
  jo.max_spacing = o.jump_grid_h;
  const JumpResult jump = compute_jump(w0, L, init.r0, jo);
  res.initial_jump = jump.size;
  if (jump.size > 0.0) res.jump_events.push_back({0.0, jump.size});
  const double lam0 = L - jump.size;
  if (jump.reaches_core) {
    res.boundary = Boundary::constant(grid, init.r0, L);
    res.boundary.zeta = 0.0;
    res.converged = true;
    return res;
  }

  Boundary cur = o.initial_iterate ? *o.initial_iterate : Boundary::constant(grid, lam0, L);
  require(cur.times.size() == grid.size(), ErrorCode::domain_error, "initial iterate must live on the grid");
  cur.values[0] = lam0;
  cur.left_limits[0] = L;
  cur.lambda0minus = L;
  if (o.keep_history) res.history.push_back(cur);

  for (int it = 1; it <= o.max_iterations; ++it) {
    GammaResult g = evaluate_gamma(init, cur, o.gamma);
    Boundary next = g.boundary;
    // node 0 is fixed by the jump rule; Γ reproduces it up to jump_tol
    next.values[0] = lam0;
    double change = 0.0;
    for (std::size_t k = 0; k < next.size(); ++k) {
      change = std::max(change, std::abs(next.values[k] - cur.values[k]));
      if (next.values[k] > cur.values[k] + 1e-13 * L) res.monotone_iterates = false;
    }
    res.changes.push_back(change);
    res.iterations = it;
    cur = std::move(next);
    res.last_gamma = std::move(g);
    if (o.keep_history) res.history.push_back(cur);
    if (change < o.tol) {
      res.converged = true;
      break;
    }
  }
  const ZetaResult z = detect_zeta(cur, init.r0);
  cur.zeta = z.zeta;
  for (std::size_t k = 1; k < cur.size(); ++k) {
    const double drop = cur.values[k - 1] - cur.values[k];
    if (drop > o.blowup_rate * (cur.times[k] - cur.times[k - 1])) res.jump_events.push_back({cur.times[k], drop});
  }
  res.boundary = std::move(cur);
  return res;
}

double GrowthResidual::worst_ratio(double slack) const {
  double worst = 0.0;
  for (std::size_t k = 0; k < residual.size(); ++k) {
    const double denom = se[k] + slack;
    if (denom > 0.0) {
      worst = std::max(worst, residual[k] / denom);
    } else if (residual[k] > 0.0) {
      return kInf;
    }
  }
  return worst;
}

GrowthResidual growth_residual(const InitialData& init, const Boundary& boundary, const GammaOptions& o) {
  const GammaResult g = evaluate_gamma(init, boundary, o);
  GrowthResidual r;
  const double L3 = cube(init.lambda0minus) / 3.0;
  for (std::size_t k = 0; k < boundary.size(); ++k) {
    r.times.push_back(boundary.times[k]);
    r.lhs.push_back(L3 - cube(boundary.values[k]) / 3.0);
    r.rhs.push_back(g.solid[k] + g.liquid[k]);
    r.residual.push_back(std::abs(r.lhs.back() - r.rhs.back()));
    r.se.push_back(g.volume_se(k));
  }
  return r;
}

GrowthResidual restart_residual(const InitialData& init, const Boundary& boundary, std::size_t k0,
                                const TemperatureField& field, const GammaOptions& o) {
  require(k0 < boundary.size(), ErrorCode::domain_error, "restart node outside the grid");
  const double t0 = boundary.times[k0];
  const double l0 = boundary.values[k0];
  std::vector<double> times, values;
  for (std::size_t k = k0; k < boundary.size(); ++k) {
    times.push_back(boundary.times[k] - t0);
    values.push_back(boundary.values[k]);
  }
  Boundary shifted = Boundary::from_values(times, values, l0);
  for (std::size_t k = 1; k < times.size(); ++k) shifted.left_limits[k] = boundary.left_limits[k0 + k];

  const PiecewiseProfile profile = field.as_profile();
  const BarrierSchedule barrier = forward_schedule(shifted, shifted.horizon(), max_step_for(o));
  const double hi = field.radii.back();
  const std::span<const double> edges(field.radii);
  const auto solid = hit_volume(profile, init.r0, l0, o.n_paths, o.stream.substream(0), barrier, times,
                                init.r0, true, o.workers, edges);
  const auto liquid = hit_volume(profile, l0, hi, o.n_paths, o.stream.substream(1), barrier, times,
                                 init.r0, true, o.workers, edges);

  // contribution of the field's own noise: node i enters through its hat function
  auto field_variance = [&](std::size_t k) {
    if (field.std_errors.empty()) return 0.0;
    double var = 0.0;
    const auto& x = field.radii;
    for (std::size_t i = 0; i < x.size(); ++i) {
      double c = 0.0;
      for (int side = 0; side < 2; ++side) {
        const std::size_t j = side == 0 ? i - 1 : i;  // cell [x_j, x_{j+1}]
        if ((side == 0 && i == 0) || j + 1 >= x.size()) continue;
        const double a = x[j], b = x[j + 1];
        if (!(b > a)) continue;
        const double up = ((cube(b) * b - cube(a) * a) / 4.0 - a * (cube(b) - cube(a)) / 3.0) / (b - a);
        const double hat = side == 0 ? up : (cube(b) - cube(a)) / 3.0 - up;
        const auto& frac = b <= l0 ? solid.cell_fraction : liquid.cell_fraction;
        const double p = frac.empty() ? 1.0 : frac[j][k];
        c += hat * p;
      }
      var += field.std_errors[i] * field.std_errors[i] * c * c;
    }
    return var;
  };

  GrowthResidual r;
  const double l03 = cube(l0) / 3.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    r.times.push_back(boundary.times[k0 + k]);
    r.lhs.push_back(l03 - cube(values[k]) / 3.0);
    r.rhs.push_back(solid.volume[k] + liquid.volume[k]);
    r.residual.push_back(std::abs(r.lhs.back() - r.rhs.back()));
    r.se.push_back(std::sqrt(solid.se[k] * solid.se[k] + liquid.se[k] * liquid.se[k] + field_variance(k)));
  }
  return r;
}

}  // namespace stefan
