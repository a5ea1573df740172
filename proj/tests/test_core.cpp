#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "stefan/core.hpp"
#include "stefan/rng.hpp"

using namespace stefan;

namespace {

InitialData half_plateau() {
  InitialData d;
  d.r0 = 1.0;
  d.lambda0minus = 2.0;
  d.growth_constant = 0.5;
  d.profile = PiecewiseProfile({{1.0, 2.0, SegmentKind::constant, 0.5, 0.0, 0.0},
                                {2.0, kInf, SegmentKind::rational_tail, 0.5, 0.0, 2.0}});
  return d;
}

}  // namespace

TEST_CASE("valid data passes every clause") {
  const auto r = validate_initial_data(half_plateau());
  CHECK(r.ok());
  CHECK(r.solid_monotonicity_changes == 0);
}

TEST_CASE("negative solid value violates non-negativity") {
  InitialData d = half_plateau();
  d.profile = PiecewiseProfile({{1.0, 2.0, SegmentKind::constant, -0.1, 0.0, 0.0}});
  const auto r = validate_initial_data(d);
  CHECK(r.violates("b.nonnegative"));
  CHECK_THROWS_AS(require_valid(d), Error);
}

TEST_CASE("constant liquid tail violates the growth bound") {
  InitialData d = half_plateau();
  d.profile = PiecewiseProfile({{2.0, kInf, SegmentKind::constant, 1.0, 0.0, 0.0}});
  CHECK(validate_initial_data(d).violates("a.growth_bound"));
}

TEST_CASE("nu integrals") {
  CHECK(nu_integral(0.0, 1.0, 1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(nu_integral(1.0, 2.0, 1.0) == doctest::Approx(7.0 / 3.0).epsilon(1e-14));
  CHECK(nu_integral(1.0, 2.0, 2.0) == doctest::Approx(14.0 / 3.0).epsilon(1e-14));
  // rational tail: ∫_2^4 0.5 (x - 2) dx = 1
  const PiecewiseProfile tail({{2.0, kInf, SegmentKind::rational_tail, 0.5, 0.0, 2.0}});
  CHECK(tail.nu_integral(2.0, 4.0) == doctest::Approx(1.0).epsilon(1e-14));
  // linear: ∫_1^2 x · x^2 dx = 15/4
  const PiecewiseProfile lin({{1.0, 2.0, SegmentKind::linear, 0.0, 1.0, 0.0}});
  CHECK(lin.nu_integral(1.0, 2.0) == doctest::Approx(3.75).epsilon(1e-14));
}

TEST_CASE("temperature conversion") {
  CHECK(w_to_temperature(0.1, 2.0, 1.0) == doctest::Approx(0.4));
  CHECK(w_to_temperature(0.0, 1.75, 1.3) == doctest::Approx(1.3 / 1.75));
  CHECK(w_to_temperature(0.0, 1.0, 0.7) == doctest::Approx(0.7));
  CHECK(temperature_to_w(w_to_temperature(0.3, 1.6, 0.9), 1.6, 0.9) == doctest::Approx(0.3));
}

TEST_CASE("profile sampler reproduces the nu-weighted mean") {
  InitialData d;
  d.profile = PiecewiseProfile::constant(1.0, 2.0, 1.0);
  const std::size_t n = 200000;
  const ProfileSample s = sample_from_profile(d, Phase::solid, n, RngStream(3, 0));
  CHECK(s.mass == doctest::Approx(7.0 / 3.0));
  double sum = 0.0, sq = 0.0;
  for (double x : s.positions) {
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sq / n - mean * mean) / n);
  CHECK(std::abs(mean - 45.0 / 28.0) <= 3.0 * se);
}

TEST_CASE("sampler rejects empty mass and respects narrow support") {
  InitialData d;
  CHECK_THROWS_AS(sample_from_profile(d, Phase::solid, 10, RngStream(1, 0)), Error);
  d.profile = PiecewiseProfile::constant(1.0, 1.01, 3.0);
  for (double x : sample_from_profile(d, Phase::solid, 10000, RngStream(1, 0)).positions) {
    CHECK(x > 1.0);
    CHECK(x < 1.01);
  }
}

TEST_CASE("monotonicity changes of piecewise profiles") {
  const std::vector<double> xs{1.0, 1.3, 1.6, 2.0}, ws{0.5, 0.2, 0.6, 0.0};
  CHECK(PiecewiseProfile::interpolate(xs, ws).monotonicity_changes(1.0, 2.0) == 2);
  CHECK(PiecewiseProfile::constant(1.0, 2.0, 0.3).monotonicity_changes(1.0, 2.0) == 0);
}

TEST_CASE("boundary interpolation and left limits") {
  const std::vector<double> t{0.0, 0.5, 1.0}, v{1.8, 1.6, 1.5};
  const Boundary b = Boundary::from_values(t, v, 2.0);
  CHECK(b.at(0.25) == doctest::Approx(1.7));
  CHECK(b.left_limit_at(0.0) == 2.0);
  CHECK(b.has_jump(0));
  CHECK(b.check(1.0).empty());
}

TEST_CASE("field from profile doubles nodes at discontinuities") {
  const TemperatureField f = field_from_profile(PiecewiseProfile::constant(1.5, 2.0, 1.0), 1.0, 2.0, 0.1);
  int doubled = 0;
  for (std::size_t i = 1; i < f.radii.size(); ++i)
    if (f.radii[i] == f.radii[i - 1]) ++doubled;
  CHECK(doubled >= 1);
  CHECK(f.as_profile()(1.75) == doctest::Approx(1.0));
}
