#include "stefan/temperature.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "stefan/growth.hpp"
#include "stefan/io.hpp"
#include "stefan/parallel.hpp"
#include "stefan/stochastic.hpp"

namespace stefan {

Estimate evaluate_w_backward(const InitialData& init, const Boundary& boundary, double t, double x,
                             const BackwardOptions& o) {
  require(x > 0.0, ErrorCode::domain_error, "radius must be positive");
  require(t >= 0.0 && t < boundary.zeta, ErrorCode::domain_error, "evaluation time must lie in [0, zeta)");
  if (x <= init.r0) return {};
  const double lt = boundary.at(t);
  if (x == lt) return {};
  // survivors end in the phase they started in, so a phase without profile mass gives exactly 0
  const bool solid = x < lt;
  const double sup = solid ? init.profile.sup(init.r0, boundary.values[0])
                           : init.profile.sup(boundary.lambda0minus, kInf);
  if (sup == 0.0) return {};

  const BarrierSchedule barrier = reversed_schedule(boundary, t, o.max_step > 0.0 ? o.max_step : kInf);
  const std::size_t n = o.n_paths;
  const std::size_t n_chunks = (n + kReductionChunk - 1) / kReductionChunk;
  std::vector<double> sums(n_chunks, 0.0), squares(n_chunks, 0.0);
  parallel_chunks(n, kReductionChunk, o.workers, [&](std::size_t c, std::size_t begin, std::size_t end) {
    double s = 0.0, q = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      const HittingRecord rec = simulate_path(x, barrier, init.r0, o.stream, i);
      if (!rec.survived()) continue;
      const double v = init.profile(rec.final_radius);
      s += v;
      q += v * v;
    }
    sums[c] = s;
    squares[c] = q;
  });
  const double dn = static_cast<double>(n);
  const double mean = pairwise_sum(sums) / dn;
  const double second = pairwise_sum(squares) / dn;
  const double var = std::max(0.0, second - mean * mean);
  return {mean, std::sqrt(var / dn)};
}

TemperatureField sample_field(const InitialData& init, const Boundary& boundary, double t,
                              std::span<const double> radii, const BackwardOptions& o) {
  TemperatureField f;
  f.time = t;
  f.radii.assign(radii.begin(), radii.end());
  f.values.resize(radii.size());
  f.std_errors.resize(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    BackwardOptions q = o;
    q.stream = o.stream.substream(i);
    const Estimate e = evaluate_w_backward(init, boundary, t, radii[i], q);
    f.values[i] = e.value;
    f.std_errors[i] = e.se;
  }
  f.tag_phases(boundary.at(t));
  return f;
}

DensitySlice forward_killed_density(const InitialData& init, const Boundary& boundary, double t,
                                    std::span<const double> edges, const ForwardOptions& o) {
  require(edges.size() >= 2, ErrorCode::domain_error, "need at least one bin");
  require(std::is_sorted(edges.begin(), edges.end()), ErrorCode::domain_error, "bin edges must ascend");
  require(t >= 0.0 && t < boundary.zeta, ErrorCode::domain_error, "slice time must lie in [0, zeta)");
  const std::size_t n_bins = edges.size() - 1;
  DensitySlice slice;
  slice.time = t;
  slice.edges.assign(edges.begin(), edges.end());
  slice.mass.assign(n_bins, 0.0);
  slice.se.assign(n_bins, 0.0);
  std::vector<double> var(n_bins, 0.0);
  double surviving_var = 0.0;

  const BarrierSchedule barrier = forward_schedule(boundary, t, o.max_step > 0.0 ? o.max_step : kInf);
  const double cutoff = std::isinf(o.liquid_cutoff) ? default_liquid_cutoff(init, t) : o.liquid_cutoff;
  for (Phase phase : {Phase::solid, Phase::liquid}) {
    const auto [lo, hi] = phase_support(init, phase, cutoff);
    if (!(lo < hi) || !(init.profile.nu_integral(lo, hi) > 0.0)) continue;
    const ProfileSampler sampler(init.profile, lo, hi);
    const RngStream stream = o.stream.substream(static_cast<std::uint64_t>(phase));
    const double m = sampler.mass();
    slice.initial_mass += m;
    const std::size_t n = o.n_paths;
    const std::size_t n_chunks = (n + kReductionChunk - 1) / kReductionChunk;
    std::vector<std::vector<std::uint32_t>> hist(n_chunks);
    std::vector<std::uint64_t> alive(n_chunks, 0);
    parallel_chunks(n, kReductionChunk, o.workers, [&](std::size_t c, std::size_t begin, std::size_t end) {
      hist[c].assign(n_bins, 0);
      for (std::size_t i = begin; i < end; ++i) {
        const auto u = stream.uniforms53(i, 0, Purpose::start);
        const double x0 = sampler.sample(u[0], u[1]);
        const HittingRecord rec = simulate_path(x0, barrier, init.r0, stream, i);
        if (!rec.survived()) continue;
        ++alive[c];
        const double r = rec.final_radius;
        if (r < edges.front() || r >= edges.back()) continue;
        const auto b = static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), r) - edges.begin()) - 1;
        ++hist[c][b];
      }
    });
    const double dn = static_cast<double>(n);
    std::vector<std::uint64_t> counts(n_bins, 0);
    std::uint64_t survivors = 0;
    for (std::size_t c = 0; c < n_chunks; ++c) {
      survivors += alive[c];
      for (std::size_t b = 0; b < n_bins; ++b) counts[b] += hist[c][b];
    }
    for (std::size_t b = 0; b < n_bins; ++b) {
      const double p = static_cast<double>(counts[b]) / dn;
      slice.mass[b] += m * p;
      var[b] += m * m * p * (1.0 - p) / dn;
    }
    const double p = static_cast<double>(survivors) / dn;
    slice.surviving_mass += m * p;
    surviving_var += m * m * p * (1.0 - p) / dn;
  }
  for (std::size_t b = 0; b < n_bins; ++b) slice.se[b] = std::sqrt(var[b]);
  slice.surviving_se = std::sqrt(surviving_var);
  return slice;
}

std::vector<BinResidual> density_identity_residual(const InitialData& init, const Boundary& boundary,
                                                   double t, std::span<const double> edges,
                                                   const BackwardOptions& backward,
                                                   const ForwardOptions& forward) {
  const std::size_t n_bins = edges.size() - 1;
  std::vector<double> points;
  for (std::size_t b = 0; b < n_bins; ++b) {
    points.push_back(edges[b]);
    points.push_back(0.5 * (edges[b] + edges[b + 1]));
  }
  points.push_back(edges.back());
  const TemperatureField field = sample_field(init, boundary, t, points, backward);
  const DensitySlice slice = forward_killed_density(init, boundary, t, edges, forward);

  std::vector<BinResidual> out(n_bins);
  for (std::size_t b = 0; b < n_bins; ++b) {
    const double h = edges[b + 1] - edges[b];
    const std::size_t i0 = 2 * b, i1 = 2 * b + 1, i2 = 2 * b + 2;
    auto f = [&](std::size_t i) { return field.values[i] * points[i] * points[i]; };
    auto s = [&](std::size_t i) { return field.std_errors[i] * points[i] * points[i]; };
    BinResidual& r = out[b];
    r.lo = edges[b];
    r.hi = edges[b + 1];
    r.backward = h / 6.0 * (f(i0) + 4.0 * f(i1) + f(i2));
    r.backward_se = h / 6.0 * std::sqrt(s(i0) * s(i0) + 16.0 * s(i1) * s(i1) + s(i2) * s(i2));
    r.forward = slice.mass[b];
    r.forward_se = slice.se[b];
    r.residual = std::abs(r.backward - r.forward);
    r.combined_se = std::sqrt(r.backward_se * r.backward_se + r.forward_se * r.forward_se);
  }
  return out;
}

double boundary_slope(const TemperatureField& field, double lambda_t, Side side, double h) {
  require(h > 0.0, ErrorCode::domain_error, "slope step must be positive");
  const double eps = 1e-12 * std::max(1.0, lambda_t);
  struct Node {
    double d, w;
  };
  std::vector<Node> nodes;
  std::size_t in_window = 0;
  for (std::size_t i = 0; i < field.radii.size(); ++i) {
    const double d = side == Side::minus ? lambda_t - field.radii[i] : field.radii[i] - lambda_t;
    if (d < -eps || d > 3.0 * h + eps) continue;
    ++in_window;
    if (d > eps) nodes.push_back({d, field.values[i]});
  }
  require(in_window >= 3 && nodes.size() >= 2, ErrorCode::coverage,
          "fewer than 3 field nodes within 3h of the boundary");
  auto nearest = [&](double target, const Node* skip) {
    const Node* best = nullptr;
    for (const Node& n : nodes) {
      if (skip && n.d == skip->d) continue;
      if (!best || std::abs(n.d - target) < std::abs(best->d - target)) best = &n;
    }
    return best;
  };
  const Node* n1 = nearest(h, nullptr);
  const Node* n2 = nearest(2.0 * h, n1);
  if (n2->d < n1->d) std::swap(n1, n2);
  const double d1 = n1->d, d2 = n2->d;
  const double g0 = (n1->w * d2 * d2 - n2->w * d1 * d1) / (d1 * d2 * (d2 - d1));
  return side == Side::minus ? -g0 : g0;
}

double SlopePair::truncation() const { return std::abs(coarse - fine) / 3.0; }

SlopePair boundary_slope_pair(const TemperatureField& field, double lambda_t, Side side, double h) {
  return {boundary_slope(field, lambda_t, side, h), boundary_slope(field, lambda_t, side, 0.5 * h)};
}

void write_density_csv(std::ostream& out, const DensitySlice& slice) {
  out << "bin_lo,bin_hi,mass\n";
  for (std::size_t b = 0; b < slice.mass.size(); ++b)
    out << format_double(slice.edges[b]) << ',' << format_double(slice.edges[b + 1]) << ','
        << format_double(slice.mass[b]) << '\n';
}

}  // namespace stefan
