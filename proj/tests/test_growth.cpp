#include <cmath>
#include <vector>

#include "doctest.h"
#include "stefan/growth.hpp"

using namespace stefan;

namespace {

InitialData with_profile(PiecewiseProfile p) {
  InitialData d;
  d.r0 = 1.0;
  d.lambda0minus = 2.0;
  d.profile = std::move(p);
  return d;
}

InitialData bump() {
  const std::vector<double> xs{1.0, 1.5, 2.0}, ws{0.0, 0.5, 0.0};
  return with_profile(PiecewiseProfile::interpolate(xs, ws));
}

GammaOptions gamma_options(std::size_t n, std::uint64_t id, double max_step) {
  GammaOptions o;
  o.n_paths = n;
  o.stream = RngStream(77, id);
  o.max_step = max_step;
  return o;
}

}  // namespace

TEST_CASE("zero profile generates the constant boundary") {
  const InitialData d = with_profile({});
  const auto grid = uniform_grid(0.0, 0.05, 11);
  const GammaResult g = evaluate_gamma(d, Boundary::constant(grid, 2.0, 2.0), gamma_options(1000, 0, 0.005));
  for (double v : g.boundary.values) CHECK(v == 2.0);
}

TEST_CASE("long-time solid melting matches the scale-function integral") {
  // w = 1 on (1, 2): Γ+ → ∫ (1 - 1/x) / (1/2) x^2 dx = 5/3
  const InitialData d = with_profile(PiecewiseProfile::constant(1.0, 2.0, 1.0));
  const auto grid = uniform_grid(0.0, 20.0, 5);
  const GammaResult g = evaluate_gamma(d, Boundary::constant(grid, 2.0, 2.0), gamma_options(40000, 1, 0.05));
  CHECK(std::abs(g.solid.back() - 5.0 / 3.0) <= 3.0 * g.solid_se.back());
}

TEST_CASE("lower trial boundaries melt more solid under common random numbers") {
  const InitialData d = bump();
  const auto grid = uniform_grid(0.0, 0.05, 11);
  std::vector<double> lower(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) lower[k] = 2.0 - 2.0 * grid[k];
  const GammaOptions o = gamma_options(20000, 2, 0.005);
  const GammaResult hi = evaluate_gamma(d, Boundary::constant(grid, 2.0, 2.0), o);
  const GammaResult lo = evaluate_gamma(d, Boundary::from_values(grid, lower, 2.0), o);
  for (std::size_t k = 0; k < grid.size(); ++k) CHECK(lo.solid[k] >= hi.solid[k]);
}

TEST_CASE("fixed point of the zero profile") {
  const auto grid = uniform_grid(0.0, 0.05, 11);
  FixedPointOptions o;
  o.gamma = gamma_options(1000, 3, 0.005);
  const FixedPointResult r = fixed_point_solve(with_profile({}), grid, o);
  CHECK(r.converged);
  CHECK(r.iterations == 1);
  for (double v : r.boundary.values) CHECK(v == 2.0);
}

TEST_CASE("fixed point iterates decrease and certify on fresh numbers") {
  const InitialData d = bump();
  const auto grid = uniform_grid(0.0, 0.02, 21);
  FixedPointOptions o;
  o.gamma = gamma_options(100000, 4, 0.001);
  o.keep_history = true;
  const FixedPointResult r = fixed_point_solve(d, grid, o);
  REQUIRE(r.converged);
  CHECK(r.monotone_iterates);
  for (std::size_t n = 1; n < r.history.size(); ++n)
    for (std::size_t k = 0; k < grid.size(); ++k) CHECK(r.history[n].values[k] <= r.history[n - 1].values[k]);

  const GrowthResidual res = growth_residual(d, r.boundary, gamma_options(100000, 5, 0.001));
  for (std::size_t k = 0; k < res.residual.size(); ++k) {
    const double se = std::hypot(res.se[k], r.last_gamma.volume_se(k));
    CHECK(res.residual[k] <= 3.0 * (se + 4.0 * o.tol));
  }

  Boundary up = r.boundary;
  for (double& v : up.values) v += 0.01;
  for (double& v : up.left_limits) v += 0.01;
  up.left_limits[0] = r.boundary.left_limits[0];
  const GrowthResidual bad = growth_residual(d, up, gamma_options(100000, 6, 0.001));
  CHECK(bad.residual.back() > 3.0 * bad.se.back());
}

TEST_CASE("zero profile has an exactly vanishing residual") {
  const auto grid = uniform_grid(0.0, 0.05, 6);
  const GrowthResidual r =
      growth_residual(with_profile({}), Boundary::constant(grid, 2.0, 2.0), gamma_options(1000, 7, 0.01));
  for (double v : r.residual) CHECK(v == 0.0);
}

TEST_CASE("physical jump sizes") {
  JumpOptions o;
  o.jump_tol = 8e-10;
  o.bisection_tol = 1e-10;
  const auto plateau = [](double level) {
    return field_from_profile(PiecewiseProfile::constant(1.8, 2.0, level), 1.0, 2.0, 1e-3);
  };
  // Λ^3 - (Λ-y)^3 = 2 (Λ^3 - (Λ-a)^3)
  CHECK(compute_jump(plateau(2.0), 2.0, 1.0, o).size ==
        doctest::Approx(2.0 - std::cbrt(2.0 * 1.8 * 1.8 * 1.8 - 8.0)).epsilon(1e-8));
  CHECK(compute_jump(plateau(1.0), 2.0, 1.0, o).size == doctest::Approx(0.2).epsilon(1e-8));
  CHECK(compute_jump(plateau(0.9), 2.0, 1.0, o).size == 0.0);
}

TEST_CASE("zeta detection") {
  const auto grid = uniform_grid(0.0, 1.0, 11);
  std::vector<double> v;
  for (double t : grid) v.push_back(2.0 - t);
  CHECK(detect_zeta(Boundary::from_values(grid, v, 2.0), 1.0).zeta == doctest::Approx(1.0));
  std::vector<double> cross{2.0, 1.8, 1.5, 1.3, 1.1, 0.9, 0.9, 0.9, 0.9, 0.9, 0.9};
  CHECK(detect_zeta(Boundary::from_values(grid, cross, 2.0), 1.0).zeta == doctest::Approx(0.45));
  CHECK(detect_zeta(Boundary::constant(grid, 1.5, 1.5), 1.0).zeta == kInf);
}
