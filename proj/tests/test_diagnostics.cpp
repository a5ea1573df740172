#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "stefan/diagnostics.hpp"
#include "stefan/growth.hpp"
#include "stefan/temperature.hpp"

using namespace stefan;

namespace {

Boundary from_function(double (*f)(double), std::size_t nodes) {
  const auto grid = uniform_grid(0.0, 1.0, nodes);
  std::vector<double> v;
  for (double t : grid) v.push_back(f(t));
  return Boundary::from_values(grid, v, v.front());
}

// Solid nodes at Λ - y for the given y values, Λ = 2.
TemperatureField solid_field(const std::vector<double>& ys, double (*w)(double)) {
  TemperatureField f;
  f.boundary = 2.0;
  for (auto it = ys.rbegin(); it != ys.rend(); ++it) {
    f.radii.push_back(2.0 - *it);
    f.values.push_back(w(*it));
  }
  f.tag_phases(2.0);
  return f;
}

std::vector<double> ys(double top, int n) {
  std::vector<double> out;
  for (int i = 1; i <= n; ++i) out.push_back(top * i / n);
  return out;
}

}  // namespace

TEST_CASE("holder exponents of model boundaries") {
  const HolderFit sq = holder_exponent(from_function([](double t) { return 1.0 - std::sqrt(t); }, 257), 0.0, 1.0);
  CHECK(std::abs(sq.exponent - 0.5) <= std::max(sq.fit_error, 0.02));
  const HolderFit lin = holder_exponent(from_function([](double t) { return 1.0 - 0.5 * t; }, 257), 0.0, 1.0);
  CHECK(lin.exponent == doctest::Approx(1.0).epsilon(0.02));
  CHECK_THROWS_AS(holder_exponent(from_function([](double t) { return 1.0 - t; }, 16), 0.0, 1.0), Error);
}

TEST_CASE("stefan residual on synthetic fields") {
  // w = a (Λ - x) below and b (x - Λ) above, so Λ' = -(a + b) / 2
  const double a = 0.6, b = 0.2, speed = -0.5 * (a + b);
  const auto grid = uniform_grid(0.0, 0.1, 11);
  std::vector<double> v;
  for (double t : grid) v.push_back(2.0 + speed * t);
  const Boundary bd = Boundary::from_values(grid, v, 2.0);
  const double t = 0.05, lt = bd.at(t);
  TemperatureField f;
  f.time = t;
  f.boundary = lt;
  for (int j = -4; j <= 4; ++j) {
    const double y = 0.01 * j;
    f.radii.push_back(lt + y);
    f.values.push_back(j < 0 ? -a * y : b * y);
  }
  f.tag_phases(lt);
  const auto r = stefan_residual(bd, {f}, 0.01);
  REQUIRE(r.size() == 1);
  CHECK(r[0].residual == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));

  TemperatureField zero = f;
  for (double& x : zero.values) x = 0.0;
  const Boundary still = Boundary::constant(grid, lt, lt);
  CHECK(stefan_residual(still, {zero}, 0.01)[0].residual == 0.0);
}

TEST_CASE("monotonicity counting") {
  CHECK(monotonicity_changes(solid_field(ys(1.0, 100), [](double y) { return y; }), 0.0) == 0);
  // six interior extrema of sin(6 pi y) on (0, 1)
  const TemperatureField s =
      solid_field(ys(0.99, 400), [](double y) { return 0.4 + 0.3 * std::sin(6.0 * std::numbers::pi * y); });
  CHECK(monotonicity_changes(s, 0.01) == 6);

  TemperatureField noisy = solid_field(ys(0.9, 200), [](double y) { return 0.5 * y; });
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-0.004, 0.004);
  for (double& v : noisy.values) v += u(gen);
  CHECK(monotonicity_changes(noisy, 0.01) == 0);
  CHECK(monotonicity_changes(noisy, 0.02) <= monotonicity_changes(noisy, 0.01));
}

TEST_CASE("positivity and liquid bounds") {
  InitialData zero;
  const auto grid = uniform_grid(0.0, 0.05, 11);
  const Boundary flat = Boundary::constant(grid, 2.0, 2.0);
  const PositivityReport z = positivity_and_bounds({}, flat, zero);
  CHECK_FALSE(z.solid_checked);
  CHECK(z.pass());

  InitialData d;
  d.growth_constant = 0.5;
  const std::vector<double> xs{1.0, 1.5, 2.0}, ws{0.0, 0.5, 0.0};
  const PiecewiseProfile hat = PiecewiseProfile::interpolate(xs, ws);
  std::vector<Segment> segs(hat.segments().begin(), hat.segments().end());
  segs.push_back({2.0, kInf, SegmentKind::rational_tail, 0.5, 0.0, 2.0});
  d.profile = PiecewiseProfile(segs);

  BackwardOptions o;
  o.n_paths = 100000;
  o.stream = RngStream(71, 0);
  o.max_step = 0.005;
  const double t = 0.05;
  const std::vector<double> radii{1.1, 1.3, 1.5, 1.7, 1.9, 2.0, 2.2, 3.0, 4.0};
  const TemperatureField f = sample_field(d, flat, t, radii, o);
  const PositivityReport r = positivity_and_bounds({f}, flat, d);
  CHECK(r.solid_checked);
  CHECK(r.solid_positive);
  CHECK(r.decay_ok);
  CHECK(r.slope_ok);
}

TEST_CASE("analytic inequalities") {
  const ConeSweep cone = cone_volume_sweep(21, 21, 8);
  CHECK(cone.identity_error <= 1e-14);
  CHECK(std::isfinite(cone.c_fit));

  const RotationCheck rot = rotation_perturbation_check(500, 1024, RngStream(72, 0));
  CHECK(rot.pass);
  CHECK(rot.zero_angle_error <= 1e-12);

  int tilt = 0;
  for (const QuadratureCase& c : brownian_density_checks(1e-10)) {
    CHECK_MESSAGE(c.pass, c.name);
    if (c.name.rfind("gaussian_tilt_mass", 0) == 0) {
      ++tilt;
      CHECK(c.lhs == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
  CHECK(tilt == 3);
}
