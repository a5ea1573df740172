#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "stefan/parallel.hpp"
#include "stefan/rng.hpp"
#include "stefan/stochastic.hpp"

using namespace stefan;

namespace {

struct Mean {
  double mean, se;
};

template <class F>
Mean sample_mean(std::size_t n, F&& f) {
  double s = 0.0, q = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = f(i);
    s += v;
    q += v * v;
  }
  const double m = s / n;
  return {m, std::sqrt(std::max(0.0, q / n - m * m) / n)};
}

}  // namespace

TEST_CASE("philox known answers") {
  using A4 = std::array<std::uint32_t, 4>;
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("splitmix64 reference value") { CHECK(splitmix64(0) == 0xe220a8397b1dcdafull); }

TEST_CASE("streams are pure functions of their coordinates") {
  const RngStream a(11, 4), b(11, 4), c(11, 5);
  CHECK(a.uniforms(17, 3, Purpose::bridge) == b.uniforms(17, 3, Purpose::bridge));
  CHECK(a.uniforms(17, 3, Purpose::bridge) != c.uniforms(17, 3, Purpose::bridge));
  CHECK(a.substream(2).uniforms(0, 0, Purpose::start) != a.substream(3).uniforms(0, 0, Purpose::start));
  for (double u : a.uniforms53(5, 1, Purpose::aux)) {
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("chunked reduction does not depend on the worker count") {
  const std::size_t n = 50000;
  auto total = [&](unsigned workers) {
    std::vector<double> parts((n + kReductionChunk - 1) / kReductionChunk);
    parallel_chunks(n, kReductionChunk, workers, [&](std::size_t c, std::size_t b, std::size_t e) {
      double s = 0.0;
      for (std::size_t i = b; i < e; ++i) s += std::sin(0.001 * i);
      parts[c] = s;
    });
    return pairwise_sum(parts);
  };
  CHECK(total(1) == total(3));
  CHECK(total(1) == total(8));
}

TEST_CASE("zero step leaves the state unchanged") {
  const PathState s = PathState::at_radius(1.3);
  const PathState t = advance_path(s, 0.0, RngStream(1, 1), 0, 0);
  CHECK(t.pos == s.pos);
}

TEST_CASE("second moment grows by 3 dt") {
  const RngStream rng(5, 0);
  const double dt = 0.1;
  const Mean m = sample_mean(1000000, [&](std::size_t i) {
    const double r = advance_path(PathState::at_radius(1.0), dt, rng, i, 0).radius();
    return r * r;
  });
  CHECK(std::abs(m.mean - (1.0 + 3.0 * dt)) <= 3.0 * m.se);
}

TEST_CASE("inverse radius is a martingale up to the core hit") {
  const double x0 = 1.5, r0 = 1.0;
  const RngStream rng(6, 0);
  for (double t : {0.05, 0.2, 0.5}) {
    // a barrier far above keeps the path solid and never triggers
    const BarrierSchedule far = constant_schedule(100.0, t, t / 50.0);
    const Mean m = sample_mean(200000, [&](std::size_t i) {
      const HittingRecord h = simulate_path(x0, far, r0, rng, i);
      return h.hit_r0() ? 1.0 / r0 : 1.0 / h.final_radius;
    });
    CHECK(std::abs(m.mean - 1.0 / x0) <= 3.0 * m.se);
  }
}

TEST_CASE("bridge crossing probabilities") {
  CHECK(bridge_min_crossing_prob(0.5, 1.0, 0.6, 1.0) == 1.0);
  CHECK(bridge_min_crossing_prob(1.0, 1.0, 0.0, 1.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
  CHECK(bridge_min_crossing_prob(1.0, 1.0, -1e6, 1.0) == 0.0);
  CHECK(bridge_max_crossing_prob(0.0, 0.0, 1.0, 1.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
}

TEST_CASE("bridge crossing against a dense-grid simulation") {
  // Brownian bridge 1 -> 1 over unit time, level 0, sampled on 2048 steps
  // with the discrete-monitoring shift 0.5826 sqrt(h) applied to the level.
  const int steps = 2048;
  const double h = 1.0 / steps;
  const double level = 0.0 + 0.5826 * std::sqrt(h);
  std::mt19937_64 gen(20240611);
  std::normal_distribution<double> z;
  const std::size_t n = 40000;
  std::vector<double> w(steps + 1);
  std::size_t hits = 0;
  for (std::size_t p = 0; p < n; ++p) {
    w[0] = 0.0;
    for (int k = 1; k <= steps; ++k) w[k] = w[k - 1] + std::sqrt(h) * z(gen);
    bool hit = false;
    for (int k = 0; k <= steps && !hit; ++k) {
      const double b = 1.0 + w[k] - (static_cast<double>(k) / steps) * w[steps];
      hit = b <= level;
    }
    hits += hit ? 1 : 0;
  }
  const double p = static_cast<double>(hits) / n;
  const double se = std::sqrt(p * (1 - p) / n);
  CHECK(std::abs(bridge_min_crossing_prob(1.0, 1.0, 0.0, 1.0) - p) <= 3.0 * se);
}

TEST_CASE("bessel level hitting") {
  // scale function -1/y gives P(ever hit b) = b / x
  CHECK(hit_const_level_prob(2.0, 1.0, 1e12) == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(hit_const_level_prob(1.0, 1.0, 0.3) == 1.0);
  CHECK(hit_const_level_prob(2.0, 1.0, 1.0) == doctest::Approx(0.15865525393145707).epsilon(1e-12));
  const BarrierSchedule at = constant_schedule(1.0, 0.5, 0.1);
  CHECK(simulate_path(1.0, at, 0.5, RngStream(1, 0), 0).tau == 0.0);
}

TEST_CASE("bessel level hitting by simulation") {
  const std::size_t n = 200000;
  const BarrierSchedule barrier = constant_schedule(1.0, 1.0, kInf);
  const RngStream rng(8, 0);
  const Mean m = sample_mean(n, [&](std::size_t i) {
    return simulate_path(2.0, barrier, 0.5, rng, i, true, false).crossed() ? 1.0 : 0.0;
  });
  CHECK(std::abs(m.mean - 0.15865525393145707) <= 3.0 * m.se);
}

TEST_CASE("start at or below the edges") {
  const BarrierSchedule b = constant_schedule(2.0, 1.0, 0.1);
  CHECK(simulate_path(2.0, b, 1.0, RngStream(1, 0), 0).tau == 0.0);
  CHECK(simulate_path(0.9, b, 1.0, RngStream(1, 0), 0).tau_r0 == 0.0);
}

TEST_CASE("solid path hits the boundary before the core with the scale-function probability") {
  // flat boundary at 2, core at 1, start 1.5: (1/1 - 1/1.5) / (1/1 - 1/2) = 2/3
  const BarrierSchedule b = constant_schedule(2.0, 40.0, 0.02);
  const RngStream rng(9, 0);
  const Mean m = sample_mean(100000, [&](std::size_t i) {
    const HittingRecord h = simulate_path(1.5, b, 1.0, rng, i);
    return h.crossed() && !h.hit_r0() ? 1.0 : 0.0;
  });
  CHECK(std::abs(m.mean - 2.0 / 3.0) <= 3.0 * m.se);
}

TEST_CASE("hitting times are identical across worker counts") {
  PathBatch batch;
  for (int i = 0; i < 9000; ++i) batch.start_radii.push_back(1.1 + 0.8 * i / 9000.0);
  batch.stream = RngStream(4, 2);
  const BarrierSchedule b = constant_schedule(2.0, 0.1, 0.01);
  CrossingOptions one, many;
  many.workers = 6;
  const auto a = first_crossing(batch, b, 1.0, one);
  const auto c = first_crossing(batch, b, 1.0, many);
  REQUIRE(a.size() == c.size());
  bool same = true;
  for (std::size_t i = 0; i < a.size(); ++i)
    same = same && std::isnan(a[i].tau) == std::isnan(c[i].tau) && (std::isnan(a[i].tau) || a[i].tau == c[i].tau) &&
           a[i].final_radius == c[i].final_radius;
  CHECK(same);
}

TEST_CASE("bessel tail bounds") {
  const TailBoundReport r = tail_bound_check(1.0, 1.0, 0.1, 200000, RngStream(2, 0));
  CHECK(r.bound_min == doctest::Approx(2.0 * 0.5 * std::erfc(3.16227766 / std::sqrt(2.0))).epsilon(1e-6));
  CHECK(r.pass);
  const TailBoundReport far = tail_bound_check(1.0, 50.0, 0.1, 10000, RngStream(2, 1));
  CHECK(far.p_min == 0.0);
  CHECK(far.p_dev == 0.0);
  CHECK(tail_bound_check(1.0, 0.0, 0.1, 1000, RngStream(2, 2)).bound_min == doctest::Approx(1.0));
}
