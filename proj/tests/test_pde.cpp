#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "stefan/pde.hpp"

using namespace stefan;

namespace {

InitialData bump() {
  InitialData d;
  const std::vector<double> xs{1.0, 1.5, 2.0}, ws{0.0, 0.5, 0.0};
  d.profile = PiecewiseProfile::interpolate(xs, ws);
  return d;
}

// Amplitude of the first sine mode on (1, 2) after time T with the front held.
double sine_amplitude(std::size_t cells, double T) {
  FrontTrackedState s;
  s.r0 = 1.0;
  s.front = 2.0;
  s.x_max = 3.0;
  s.solid_v.resize(cells + 1);
  s.liquid_v.assign(cells + 1, 0.0);
  for (std::size_t i = 0; i <= cells; ++i) s.solid_v[i] = std::sin(std::numbers::pi * (s.solid_x(i) - 1.0));
  s.solid_v.back() = 0.0;
  const double dx = 1.0 / cells;
  const auto steps = static_cast<std::size_t>(std::llround(T / (dx * dx)));
  const double dt = T / steps;
  StepOptions o;
  o.stefan = false;
  for (std::size_t k = 0; k < steps; ++k) s = pde_step(s, dt, o);
  return s.solid_v[cells / 2];
}

}  // namespace

TEST_CASE("zero data stays at rest") {
  InitialData zero;
  PdeOptions o;
  o.dx = 5e-3;
  const PdeResult r = pde_solve(zero, 0.01, o);
  for (double v : r.boundary.values) CHECK(v == 2.0);
  for (double m : mass_balance_residual(r.fluxes)) CHECK(m == 0.0);
}

TEST_CASE("sine eigenmode decays at the separation-of-variables rate") {
  const double T = 0.05;
  const double exact = std::exp(-std::numbers::pi * std::numbers::pi * T / 2.0);
  const double a1 = sine_amplitude(40, T), a2 = sine_amplitude(80, T), a3 = sine_amplitude(160, T);
  CHECK(std::abs(a2 - exact) <= 1e-4);
  const double order = std::log2(std::abs(a1 - exact) / std::abs(a2 - exact));
  CHECK(order >= 1.8);
  const double richardson_order = std::log2(std::abs(a1 - a2) / std::abs(a2 - a3));
  CHECK(richardson_order >= 1.8);
}

TEST_CASE("liquid heat melts the solid monotonically") {
  InitialData d;
  d.growth_constant = 0.2;
  d.profile = PiecewiseProfile({{2.0, kInf, SegmentKind::rational_tail, 0.2, 0.0, 2.0}});
  PdeOptions o;
  o.dx = 4e-3;
  const PdeResult r = pde_solve(d, 0.02, o);
  CHECK(r.monotone);
  CHECK(r.boundary.values.back() < 2.0);
  for (std::size_t k = 1; k < r.boundary.size(); ++k) CHECK(r.boundary.values[k] <= r.boundary.values[k - 1]);
}

TEST_CASE("mass balance residual shrinks under refinement") {
  auto worst = [](double dx) {
    PdeOptions o;
    o.dx = dx;
    double m = 0.0;
    for (double v : mass_balance_residual(pde_solve(bump(), 0.02, o).fluxes)) m = std::max(m, v);
    return m;
  };
  const double coarse = worst(4e-3), fine = worst(2e-3);
  CHECK(fine < coarse);

  PdeOptions frozen;
  frozen.dx = 4e-3;
  frozen.stefan = false;
  const auto r = mass_balance_residual(pde_solve(bump(), 0.01, frozen).fluxes);
  CHECK(r.back() > 1e-6);
}

TEST_CASE("solid bump front speed") {
  PdeOptions o;
  o.dx = 2e-3;
  const PdeResult r = pde_solve(bump(), 0.02, o);
  const double speed = (r.boundary.values.back() - 2.0) / 0.02;
  CHECK(speed == doctest::Approx(-0.5).epsilon(0.05));
  CHECK_FALSE(r.blowup_time.has_value());
}
