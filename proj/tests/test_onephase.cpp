#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "stefan/onephase.hpp"

using namespace stefan;

namespace {

PiecewiseProfile half_block() { return PiecewiseProfile::constant(0.0, 0.1, 0.5); }

OnePhaseOptions options(std::size_t n, std::uint64_t id) {
  OnePhaseOptions o;
  o.n_paths = n;
  o.stream = RngStream(53, id);
  return o;
}

// Picard iteration for λ_s = E[F(sup (B + λ))] with F(m) = 0.5 min(m, 0.1)^+,
// on its own uniform grid and generator. Returns λ_T and its standard error.
std::pair<double, double> picard_oracle(double T, int steps, std::size_t n) {
  const double dt = T / steps;
  auto F = [](double m) { return 0.5 * std::clamp(m, 0.0, 0.1); };
  std::vector<double> lam(steps + 1, 0.0), next(steps + 1);
  double se = 0.0;
  for (int it = 0; it < 200; ++it) {
    std::mt19937_64 gen(8128);
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> u;
    std::vector<double> sum(steps + 1, 0.0), sq(steps + 1, 0.0);
    for (std::size_t p = 0; p < n; ++p) {
      double b = 0.0, m = lam[0];
      for (int k = 1; k <= steps; ++k) {
        const double a = b + lam[k - 1];
        b += std::sqrt(dt) * z(gen);
        const double e = b + lam[k];
        const double bridge = 0.5 * (a + e + std::sqrt((e - a) * (e - a) - 2.0 * dt * std::log(1.0 - u(gen))));
        m = std::max(m, bridge);
        const double v = F(m);
        sum[k] += v;
        sq[k] += v * v;
      }
    }
    double change = 0.0;
    next[0] = 0.0;
    for (int k = 1; k <= steps; ++k) {
      next[k] = sum[k] / n;
      change = std::max(change, std::abs(next[k] - lam[k]));
    }
    lam = next;
    se = std::sqrt((sq[steps] / n - lam[steps] * lam[steps]) / n);
    if (change < 1e-9) break;
  }
  return {lam[steps], se};
}

}  // namespace

TEST_CASE("zero sub-density gives the zero boundary") {
  const auto grid = uniform_grid(0.0, 0.01, 5);
  const OnePhaseSolution s = solve_one_phase(PiecewiseProfile{}, grid, options(1000, 0));
  for (double v : s.lambda) CHECK(v == 0.0);
}

TEST_CASE("agrees with a dense-grid Picard oracle") {
  const double T = 0.01;
  // the grid bias is first order in the spacing, so 9 nodes would sit several s.e. low
  const auto grid = uniform_grid(0.0, T, 33);
  const OnePhaseSolution s = solve_one_phase(half_block(), grid, options(200000, 1));
  REQUIRE(s.converged);
  CHECK(s.monotone_iterates);
  const auto [oracle, oracle_se] = picard_oracle(T, 256, 200000);
  CHECK(std::abs(s.lambda.back() - oracle) <= 3.0 * std::hypot(s.se.back(), oracle_se));
}

TEST_CASE("sub-additivity and scaling minorization") {
  const auto grid = uniform_grid(0.0, 0.04, 17);
  const OnePhaseOptions o = options(50000, 2);
  const OnePhaseSolution s = solve_one_phase(half_block(), grid, o);
  const OrderingReport sub = subadditivity_check(s);
  CHECK(sub.pass);
  // s = 0 and s = t pairs hold with equality
  CHECK(s.lambda[0] + s.lambda[8] == doctest::Approx(s.lambda[8]));
  CHECK(2.0 * s.lambda[4] >= s.lambda[8] - 3.0 * s.se[8]);

  const ScalingReport one = scaling_minorization_check(s, 1.0, o);
  CHECK(one.pass);
  CHECK(one.direct.worst_margin >= 0.0);
  CHECK(scaling_minorization_check(s, 0.25, o).pass);
}

TEST_CASE("invalid sub-densities") {
  const auto grid = uniform_grid(0.0, 0.01, 5);
  const PiecewiseProfile rising({{0.0, 0.1, SegmentKind::linear, 0.1, 5.0, 0.0}});
  const OnePhaseSolution s = solve_one_phase(rising, grid, options(1000, 3));
  CHECK_THROWS_AS(scaling_minorization_check(s, 0.25, options(1000, 3)), Error);
  CHECK_THROWS_AS(require_valid_subdensity(PiecewiseProfile::constant(0.0, 0.1, 1.5)), Error);
  CHECK_THROWS_AS(require_valid_subdensity(PiecewiseProfile::constant(0.0, kInf, 0.5)), Error);
}
