#include "stefan/stochastic.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <ostream>

#include "stefan/parallel.hpp"

namespace stefan {

namespace {

// Uniforms are at least 2^-33, so a crossing probability below e^-23 can never
// fire; skipping the exponential there does not change any decision.
constexpr double kNegligibleExponent = 23.0;

double crossing_exp(double da, double db, double dt) {
  const double e = 2.0 * da * db / dt;
  return e > kNegligibleExponent ? 0.0 : std::exp(-e);
}

void append_interval(BarrierSchedule& b, double s0, double l0, double s1, double l1, double max_step) {
  const double len = s1 - s0;
  if (len > 0.0) {
    const auto m = static_cast<std::size_t>(
        std::max(1.0, std::ceil(len / max_step - 1e-9)));
    for (std::size_t i = 1; i < m; ++i) {
      const double f = static_cast<double>(i) / static_cast<double>(m);
      b.s.push_back(s0 + f * len);
      b.level.push_back(l0 + f * (l1 - l0));
    }
  }
  b.s.push_back(s1);
  b.level.push_back(l1);
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double PathState::radius() const {
  return std::sqrt(pos[0] * pos[0] + pos[1] * pos[1] + pos[2] * pos[2]);
}

PathState advance_path(const PathState& state, double dt, const RngStream& rng, std::uint64_t path,
                       std::uint32_t step) {
  require(dt >= 0.0, ErrorCode::domain_error, "time step must be non-negative");
  if (dt == 0.0) return state;
  const auto z = rng.normals(path, step);
  const double sd = std::sqrt(dt);
  return PathState{{state.pos[0] + sd * z[0], state.pos[1] + sd * z[1], state.pos[2] + sd * z[2]}};
}

double bridge_min_crossing_prob(double a, double b, double level, double dt) {
  require(dt > 0.0, ErrorCode::domain_error, "bridge duration must be positive");
  if (a <= level || b <= level) return 1.0;
  return std::exp(-2.0 * (a - level) * (b - level) / dt);
}

double bridge_max_crossing_prob(double a, double b, double level, double dt) {
  return bridge_min_crossing_prob(-a, -b, -level, dt);
}

double bessel_bridge_min_crossing_prob(double a, double b, double level, double dt) {
  require(dt > 0.0, ErrorCode::domain_error, "bridge duration must be positive");
  if (a <= level || b <= level) return 1.0;
  if (level <= 0.0) return 0.0;
  const double p = std::exp(-2.0 * (a - level) * (b - level) / dt);
  const double q = std::exp(-2.0 * a * b / dt);
  return std::clamp((p - q) / (1.0 - q), 0.0, 1.0);
}

double hit_const_level_prob(double x, double b, double t) {
  require(b > 0.0 && x > 0.0 && t > 0.0, ErrorCode::domain_error,
          "hit_const_level_prob needs x, b, t > 0");
  if (b == x) return 1.0;
  require(b < x, ErrorCode::domain_error, "hit_const_level_prob needs b < x");
  return (b / x) * 2.0 * normal_cdf(-(x - b) / std::sqrt(t));
}

BarrierSchedule forward_schedule(const Boundary& boundary, double horizon, double max_step) {
  require(max_step > 0.0, ErrorCode::domain_error, "max_step must be positive");
  require(horizon >= 0.0 && horizon <= boundary.horizon() * (1.0 + 1e-12), ErrorCode::domain_error,
          "horizon beyond the boundary grid");
  BarrierSchedule b;
  b.reference = boundary.lambda0minus;
  b.s.push_back(0.0);
  b.level.push_back(boundary.lambda0minus);
  if (boundary.values[0] != boundary.lambda0minus) {
    b.s.push_back(0.0);
    b.level.push_back(boundary.values[0]);
  }
  for (std::size_t k = 0; k + 1 < boundary.size(); ++k) {
    const double t0 = boundary.times[k], t1 = boundary.times[k + 1];
    if (t0 >= horizon) break;
    if (t1 > horizon) {
      append_interval(b, t0, boundary.values[k], horizon, boundary.at(horizon), max_step);
      break;
    }
    append_interval(b, t0, boundary.values[k], t1, boundary.left_limits[k + 1], max_step);
    if (boundary.has_jump(k + 1)) {
      b.s.push_back(t1);
      b.level.push_back(boundary.values[k + 1]);
    }
  }
  return b;
}

BarrierSchedule reversed_schedule(const Boundary& boundary, double t, double max_step) {
  require(max_step > 0.0, ErrorCode::domain_error, "max_step must be positive");
  require(t >= 0.0 && t <= boundary.horizon() * (1.0 + 1e-12), ErrorCode::domain_error,
          "evaluation time outside the boundary grid");
  BarrierSchedule b;
  const auto it = std::upper_bound(boundary.times.begin(), boundary.times.end(), t);
  std::size_t k = static_cast<std::size_t>(it - boundary.times.begin()) - 1;
  const double lt = boundary.at(t);
  b.reference = lt;
  b.s.push_back(0.0);
  b.level.push_back(lt);
  double s_pos = 0.0, level_pos = lt;
  for (;;) {
    const double s_node = t - boundary.times[k];
    if (s_node > s_pos) {
      append_interval(b, s_pos, level_pos, s_node, boundary.values[k], max_step);
    }
    // crossing the node backwards in time lands on its left limit
    level_pos = boundary.values[k];
    if (boundary.has_jump(k)) {
      b.s.push_back(s_node);
      b.level.push_back(boundary.left_limits[k]);
      level_pos = boundary.left_limits[k];
    }
    s_pos = s_node;
    if (k == 0) break;
    --k;
    // the interval (t_k, t_{k+1}) runs from left_limits[k+1] down to values[k]
    level_pos = boundary.left_limits[k + 1];
  }
  return b;
}

BarrierSchedule constant_schedule(double level, double horizon, double max_step) {
  BarrierSchedule b;
  b.reference = level;
  b.s.push_back(0.0);
  b.level.push_back(level);
  append_interval(b, 0.0, level, horizon, level, max_step);
  return b;
}

HittingRecord simulate_path(double x0, const BarrierSchedule& barrier, double r0, const RngStream& rng,
                            std::uint64_t path, bool stop_at_first_event, bool track_r0) {
  require(x0 > 0.0, ErrorCode::domain_error, "start radius must be positive");
  HittingRecord rec;
  rec.final_radius = x0;
  const bool solid = x0 <= barrier.reference;
  rec.origin = solid ? Phase::solid : Phase::liquid;

  auto beyond = [solid](double r, double lev) { return solid ? r >= lev : r <= lev; };
  auto finished = [&] {
    if (stop_at_first_event) return rec.crossed() || rec.hit_r0();
    return rec.crossed() && (!track_r0 || rec.hit_r0());
  };

  const double s0 = barrier.s.front();
  if (beyond(x0, barrier.level.front())) rec.tau = s0;
  if (track_r0 && x0 <= r0) rec.tau_r0 = s0;
  if (finished()) return rec;

  PathState st = PathState::at_radius(x0);
  double R = x0;
  const std::size_t n = barrier.s.size();
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const double dt = barrier.s[j + 1] - barrier.s[j];
    const double L0 = barrier.level[j], L1 = barrier.level[j + 1];
    double Rb = R;
    if (dt > 0.0) {
      st = advance_path(st, dt, rng, path, static_cast<std::uint32_t>(j));
      Rb = st.radius();
    }
    const bool watch_barrier = !rec.crossed();
    const bool watch_r0 = track_r0 && !rec.hit_r0();
    bool cross = watch_barrier && beyond(Rb, L1);
    bool hit = watch_r0 && Rb <= r0;
    if (dt > 0.0 && !cross && !hit) {
      double pc = 0.0, ph = 0.0;
      if (watch_barrier) {
        if (solid) {
          pc = crossing_exp(L0 - R, L1 - Rb, dt);
        } else {
          const double p = crossing_exp(R - L0, Rb - L1, dt);
          if (p > 0.0) {
            const double q = crossing_exp(R, Rb, dt);
            pc = (p - q) / (1.0 - q);
          }
        }
      }
      if (watch_r0) {
        const double p = crossing_exp(R - r0, Rb - r0, dt);
        if (p > 0.0) {
          const double q = crossing_exp(R, Rb, dt);
          ph = (p - q) / (1.0 - q);
        }
      }
      if (pc > 0.0 || ph > 0.0) {
        const auto u = rng.uniforms(path, static_cast<std::uint32_t>(j), Purpose::bridge);
        cross = u[0] < pc;
        hit = u[1] < ph;
        if (cross && hit) {
          // both excursions fired inside one step; keep one in proportion
          if (u[2] * (pc + ph) < pc) hit = false; else cross = false;
        }
        if (!cross && !hit) rec.weight *= (1.0 - pc) * (1.0 - ph);
      }
    }
    const double when = dt > 0.0 ? barrier.s[j] + 0.5 * dt : barrier.s[j + 1];
    if (cross) rec.tau = when;
    if (hit) rec.tau_r0 = when;
    R = Rb;
    if (finished()) break;
  }
  rec.final_radius = R;
  return rec;
}

std::vector<HittingRecord> first_crossing(const PathBatch& batch, const BarrierSchedule& barrier,
                                          double r0, const CrossingOptions& options) {
  require(barrier.s.size() >= 1, ErrorCode::domain_error, "empty barrier schedule");
  for (double x : batch.start_radii)
    require(x > 0.0, ErrorCode::domain_error, "start radius must be positive");
  std::vector<HittingRecord> out(batch.start_radii.size());
  parallel_chunks(out.size(), kReductionChunk, options.workers,
                  [&](std::size_t, std::size_t begin, std::size_t end) {
                    for (std::size_t i = begin; i < end; ++i)
                      out[i] = simulate_path(batch.start_radii[i], barrier, r0, batch.stream,
                                             batch.path_offset + i, options.stop_at_first_event,
                                             options.track_r0);
                  });
  return out;
}

TailBoundReport tail_bound_check(double x, double a, double t, std::size_t n_paths,
                                 const RngStream& stream, unsigned workers, std::size_t steps) {
  require(x > 0.0 && a >= 0.0 && t > 0.0 && n_paths > 0 && steps > 0, ErrorCode::domain_error,
          "tail_bound_check needs x > 0, a >= 0, t > 0");
  TailBoundReport rep;
  rep.x = x;
  rep.a = a;
  rep.t = t;
  rep.n_paths = n_paths;
  rep.bound_min = 2.0 * normal_cdf(-a / std::sqrt(t));
  rep.bound_dev = 12.0 * normal_cdf(-a / std::sqrt(3.0 * t));

  const double lo = x - a, hi = x + a, dt = t / static_cast<double>(steps);
  const std::size_t n_chunks = (n_paths + kReductionChunk - 1) / kReductionChunk;
  std::vector<std::size_t> min_hits(n_chunks, 0), dev_hits(n_chunks, 0);
  parallel_chunks(n_paths, kReductionChunk, workers, [&](std::size_t c, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      if (a == 0.0) {
        ++min_hits[c];
        ++dev_hits[c];
        continue;
      }
      PathState st = PathState::at_radius(x);
      double R = x;
      bool below = false, outside = false;
      for (std::size_t j = 0; j < steps && !(below && outside); ++j) {
        st = advance_path(st, dt, stream, i, static_cast<std::uint32_t>(j));
        const double Rb = st.radius();
        bool b_now = !below && lo > 0.0 && Rb <= lo;
        bool up_now = !outside && Rb >= hi;
        const auto u = (below && outside) ? std::array<double, 4>{}
                                          : stream.uniforms(i, static_cast<std::uint32_t>(j), Purpose::bridge);
        if (!below && !b_now && lo > 0.0) b_now = u[0] < bessel_bridge_min_crossing_prob(R, Rb, lo, dt);
        if (!outside && !up_now) up_now = u[1] < bridge_max_crossing_prob(R, Rb, hi, dt);
        below = below || b_now;
        outside = outside || b_now || up_now;
        R = Rb;
      }
      min_hits[c] += below;
      dev_hits[c] += outside;
    }
  });
  std::size_t h_min = 0, h_dev = 0;
  for (std::size_t c = 0; c < n_chunks; ++c) {
    h_min += min_hits[c];
    h_dev += dev_hits[c];
  }
  const double n = static_cast<double>(n_paths);
  rep.p_min = static_cast<double>(h_min) / n;
  rep.p_dev = static_cast<double>(h_dev) / n;
  rep.p_min_se = std::sqrt(rep.p_min * (1.0 - rep.p_min) / n);
  rep.p_dev_se = std::sqrt(rep.p_dev * (1.0 - rep.p_dev) / n);
  rep.pass = rep.p_min <= rep.bound_min + 3.0 * rep.p_min_se &&
             rep.p_dev <= rep.bound_dev + 3.0 * rep.p_dev_se;
  return rep;
}

void write_hitting_records(std::ostream& out, std::span<const HittingRecord> records) {
  auto put = [&](double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    char buf[8];
    std::memcpy(buf, &bits, 8);
    out.write(buf, 8);
  };
  for (const auto& r : records) {
    put(r.tau);
    put(r.tau_r0);
    put(r.weight);
    const char phase = static_cast<char>(r.origin);
    out.write(&phase, 1);
  }
}

}  // namespace stefan
