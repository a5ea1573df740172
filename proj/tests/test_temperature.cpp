#include <cmath>
#include <vector>

#include "doctest.h"
#include "stefan/pde.hpp"
#include "stefan/temperature.hpp"

using namespace stefan;

namespace {

InitialData bump() {
  InitialData d;
  const std::vector<double> xs{1.0, 1.5, 2.0}, ws{0.0, 0.5, 0.0};
  d.profile = PiecewiseProfile::interpolate(xs, ws);
  return d;
}

BackwardOptions backward(std::size_t n, std::uint64_t id, double max_step) {
  BackwardOptions o;
  o.n_paths = n;
  o.stream = RngStream(31, id);
  o.max_step = max_step;
  return o;
}

ForwardOptions forward(std::size_t n, std::uint64_t id, double max_step) {
  ForwardOptions o;
  o.n_paths = n;
  o.stream = RngStream(32, id);
  o.max_step = max_step;
  return o;
}

Boundary flat(double horizon) { return Boundary::constant(uniform_grid(0.0, horizon, 11), 2.0, 2.0); }

}  // namespace

TEST_CASE("backward evaluation at time zero and inside the core") {
  const InitialData d = bump();
  const Boundary b = flat(0.1);
  CHECK(evaluate_w_backward(d, b, 0.0, 1.25, backward(100, 0, 0.01)).value == doctest::Approx(0.25));
  CHECK(evaluate_w_backward(d, b, 0.05, 0.9, backward(100, 0, 0.01)).value == 0.0);
  CHECK(evaluate_w_backward(d, b, 0.05, 1.0, backward(100, 0, 0.01)).value == 0.0);
}

TEST_CASE("backward evaluation agrees with the fixed-front finite-difference solution") {
  const InitialData d = bump();
  const double t = 0.02;
  PdeOptions po;
  po.stefan = false;
  po.snapshot_times = {t};
  auto fd_at = [&](double dx, double x) {
    po.dx = dx;
    return pde_solve(d, t, po).snapshots.front().as_profile()(x);
  };
  for (double x : {1.3, 1.5, 1.8}) {
    const double coarse = fd_at(4e-3, x), fine = fd_at(2e-3, x);
    const Estimate mc = evaluate_w_backward(d, flat(t), t, x, backward(200000, 1, t / 100));
    const double tol = std::max(3.0 * mc.se, 2.0 * std::abs(coarse - fine));
    CHECK(std::abs(mc.value - fine) <= tol);
  }
}

TEST_CASE("forward density slices") {
  const std::vector<double> edges{1.0, 1.25, 1.5, 1.75, 2.0};
  InitialData zero;
  const DensitySlice z = forward_killed_density(zero, flat(0.1), 0.05, edges, forward(1000, 0, 0.01));
  for (double m : z.mass) CHECK(m == 0.0);

  const InitialData d = bump();
  const DensitySlice s0 = forward_killed_density(d, flat(0.1), 0.0, edges, forward(200000, 1, 0.01));
  for (std::size_t i = 0; i + 1 < edges.size(); ++i)
    CHECK(std::abs(s0.mass[i] - d.profile.nu_integral(edges[i], edges[i + 1])) <= 3.0 * s0.se[i] + 1e-12);

  double prev = kInf;
  for (double t : {0.0, 0.02, 0.05, 0.1}) {
    const DensitySlice s = forward_killed_density(d, flat(0.1), t, edges, forward(50000, 2, 0.01));
    CHECK(s.surviving_mass <= prev);
    prev = s.surviving_mass;
  }
}

TEST_CASE("time reversal identity on a flat boundary") {
  const InitialData d = bump();
  const double t = 0.1;
  const std::vector<double> edges{1.0, 1.2, 1.4, 1.6, 1.8, 2.0};
  for (const BinResidual& r :
       density_identity_residual(d, flat(t), t, edges, backward(40000, 2, t / 100), forward(400000, 3, t / 100)))
    CHECK(r.residual <= 3.0 * r.combined_se);

  // total surviving mass against composite Simpson over 20 panels of independent queries
  const int panels = 20;
  double integral = 0.0, var = 0.0;
  for (int i = 0; i <= panels; ++i) {
    const double x = 1.0 + static_cast<double>(i) / panels;
    const double wgt = (i == 0 || i == panels ? 1.0 : (i % 2 ? 4.0 : 2.0)) / (3.0 * panels);
    const Estimate e = evaluate_w_backward(d, flat(t), t, x, backward(40000, 100 + i, t / 100));
    integral += wgt * e.value * x * x;
    var += std::pow(wgt * e.se * x * x, 2);
  }
  const DensitySlice fwd = forward_killed_density(d, flat(t), t, std::vector<double>{1.0, 2.0}, forward(400000, 5, t / 100));
  CHECK(std::abs(integral - fwd.surviving_mass) <= 3.0 * std::hypot(std::sqrt(var), fwd.surviving_se));

  InitialData zero;
  for (const BinResidual& r :
       density_identity_residual(zero, flat(t), t, edges, backward(100, 6, t / 10), forward(100, 7, t / 10)))
    CHECK(r.residual == 0.0);
}

TEST_CASE("boundary slope stencil") {
  const double lam = 2.0, a = 0.7, b = 1.3;
  TemperatureField f;
  f.boundary = lam;
  for (int i = 20; i >= 0; --i) {
    const double y = 0.01 * i;
    f.radii.push_back(lam - y);
    f.values.push_back(a * y + b * y * y);
  }
  f.tag_phases(lam);
  CHECK(boundary_slope(f, lam, Side::minus, 0.05) == doctest::Approx(-a).epsilon(1e-10));
  for (double& v : f.values) v = 0.0;
  CHECK(boundary_slope(f, lam, Side::minus, 0.05) == 0.0);
}
