#include "stefan/pde.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

// Boost 1.74's pchip calls isnan unqualified
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>

#include "stefan/growth.hpp"
#include "stefan/io.hpp"

namespace stefan {

namespace {

// Solves (1 + 2μ) u_i - μ (u_{i-1} + u_{i+1}) = rhs_i on the interior with u = 0 at both ends.
void crank_nicolson(std::vector<double>& v, double mu) {
  const std::size_t n = v.size();
  if (n < 3) return;
  const std::size_t m = n - 2;
  std::vector<double> rhs(m), c(m);
  for (std::size_t i = 0; i < m; ++i) rhs[i] = (1.0 - 2.0 * mu) * v[i + 1] + mu * (v[i] + v[i + 2]);
  const double diag = 1.0 + 2.0 * mu;
  // Thomas sweep
  double denom = diag;
  c[0] = -mu / denom;
  rhs[0] /= denom;
  for (std::size_t i = 1; i < m; ++i) {
    denom = diag + mu * c[i - 1];
    c[i] = -mu / denom;
    rhs[i] = (rhs[i] + mu * rhs[i - 1]) / denom;
  }
  for (std::size_t i = m - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
  for (std::size_t i = 0; i < m; ++i) v[i + 1] = rhs[i];
  v.front() = 0.0;
  v.back() = 0.0;
}

std::vector<double> grid(double lo, double hi, std::size_t nodes) {
  std::vector<double> x(nodes);
  const double h = (hi - lo) / static_cast<double>(nodes - 1);
  for (std::size_t i = 0; i < nodes; ++i) x[i] = lo + h * static_cast<double>(i);
  x.back() = hi;
  return x;
}

// Values on [new_lo, new_hi] from the old grid; zero where the old grid does not reach.
std::vector<double> remap(const std::vector<double>& v, double old_lo, double old_hi, double new_lo, double new_hi) {
  const std::size_t n = v.size();
  std::vector<double> xs = grid(old_lo, old_hi, n), ys = v;
  boost::math::interpolators::pchip<std::vector<double>> spline(std::move(xs), std::move(ys));
  std::vector<double> out(n, 0.0);
  const std::vector<double> nx = grid(new_lo, new_hi, n);
  for (std::size_t i = 1; i + 1 < n; ++i)
    if (nx[i] > old_lo && nx[i] < old_hi) out[i] = spline(nx[i]);
  return out;
}

std::size_t cells(double length, double dx) {
  return std::max<std::size_t>(4, static_cast<std::size_t>(std::ceil(length / dx - 1e-9)));
}

}  // namespace

double FrontTrackedState::solid_dx() const {
  return (front - r0) / static_cast<double>(solid_v.size() - 1);
}
double FrontTrackedState::liquid_dx() const {
  return (x_max - front) / static_cast<double>(liquid_v.size() - 1);
}
double FrontTrackedState::solid_x(std::size_t i) const {
  return i + 1 == solid_v.size() ? front : r0 + solid_dx() * static_cast<double>(i);
}
double FrontTrackedState::liquid_x(std::size_t i) const {
  return i + 1 == liquid_v.size() ? x_max : front + liquid_dx() * static_cast<double>(i);
}

TemperatureField FrontTrackedState::field() const {
  TemperatureField f;
  f.time = time;
  for (std::size_t i = 0; i < solid_v.size(); ++i) {
    const double x = solid_x(i);
    f.radii.push_back(x);
    f.values.push_back(solid_v[i] / x);
  }
  for (std::size_t i = 1; i < liquid_v.size(); ++i) {
    const double x = liquid_x(i);
    f.radii.push_back(x);
    f.values.push_back(liquid_v[i] / x);
  }
  f.tag_phases(front);
  return f;
}

double default_x_max(const InitialData& init, double horizon) {
  return init.lambda0minus + 8.0 * std::sqrt(horizon);
}

FrontTrackedState initial_state(const InitialData& init, double dx, double x_max) {
  require(dx > 0.0, ErrorCode::domain_error, "dx must be positive");
  require(x_max > init.lambda0minus, ErrorCode::domain_error, "x_max must exceed the initial boundary");
  const double l = init.lambda0minus;
  const double eps = 1e-12 * l;
  const double jump = std::abs(init.profile(l - eps) - init.profile(l));
  require(jump <= 1e-9 * std::max(1.0, init.sup_norm()), ErrorCode::precondition,
          "initial profile must be continuous at the initial boundary");
  FrontTrackedState s;
  s.front = l;
  s.r0 = init.r0;
  s.x_max = x_max;
  s.solid_v.assign(cells(l - init.r0, dx) + 1, 0.0);
  s.liquid_v.assign(cells(x_max - l, dx) + 1, 0.0);
  for (std::size_t i = 1; i + 1 < s.solid_v.size(); ++i) {
    const double x = s.solid_x(i);
    s.solid_v[i] = x * init.profile(x);
  }
  for (std::size_t i = 1; i + 1 < s.liquid_v.size(); ++i) {
    const double x = s.liquid_x(i);
    s.liquid_v[i] = x * init.profile(x);
  }
  return s;
}

std::pair<double, double> front_slopes(const FrontTrackedState& s) {
  const std::size_t n = s.solid_v.size() - 1;
  const double vx_minus = (-4.0 * s.solid_v[n - 1] + s.solid_v[n - 2]) / (2.0 * s.solid_dx());
  const double vx_plus = (4.0 * s.liquid_v[1] - s.liquid_v[2]) / (2.0 * s.liquid_dx());
  // w = v/x vanishes at the front, so ∂x w = ∂x v / Λ there
  return {vx_minus / s.front, vx_plus / s.front};
}

FrontTrackedState pde_step(const FrontTrackedState& state, double dt, const StepOptions& o, StepInfo* info) {
  require(dt > 0.0, ErrorCode::domain_error, "time step must be positive");
  StepInfo local;
  StepInfo& out = info ? *info : local;
  out = {};
  const double hs = state.solid_dx(), hl = state.liquid_dx();
  require(state.front > state.r0 + 2.0 * hs, ErrorCode::precondition, "front too close to the core");
  const auto [wm, wp] = front_slopes(state);
  out.wx_minus = wm;
  out.wx_plus = wp;
  out.velocity = o.stefan ? 0.5 * (wm - wp) : 0.0;
  out.remap_warning = dt > std::min(hs, hl) * std::min(hs, hl);
  if (std::abs(out.velocity) > o.blowup_thresh) {
    out.blowup = true;
    return state;
  }
  const double new_front = state.front + dt * out.velocity;
  if (new_front <= state.r0 + 2.0 * hs) {
    out.zeta = true;
    return state;
  }

  FrontTrackedState next = state;
  crank_nicolson(next.solid_v, dt / (4.0 * hs * hs));
  crank_nicolson(next.liquid_v, dt / (4.0 * hl * hl));
  if (new_front != state.front) {
    next.solid_v = remap(next.solid_v, state.r0, state.front, state.r0, new_front);
    next.liquid_v = remap(next.liquid_v, state.front, state.x_max, new_front, state.x_max);
    next.front = new_front;
  }
  next.time = state.time + dt;
  return next;
}

PdeResult pde_solve(const InitialData& init, double horizon, const PdeOptions& o) {
  require_valid(init);
  require(horizon > 0.0, ErrorCode::domain_error, "horizon must be positive");
  require(o.dx > 0.0 && o.dt >= 0.0, ErrorCode::domain_error, "dx must be positive and dt non-negative");
  {
    const TemperatureField exact = field_from_profile(init.profile, init.r0, init.lambda0minus, 1e-3);
    JumpOptions jo;
    jo.jump_tol = 1e-10 * std::pow(init.lambda0minus, 3);
    require(compute_jump(exact, init.lambda0minus, init.r0, jo).size == 0.0, ErrorCode::precondition,
            "initial data requires a jump at t = 0; resolve it before the finite-difference solve");
  }
  PdeResult r;
  r.x_max = std::isinf(o.x_max) ? default_x_max(init, horizon) : o.x_max;
  const double dt0 = o.dt > 0.0 ? o.dt : o.dx * o.dx;
  const auto n_steps = static_cast<std::size_t>(std::ceil(horizon / dt0 - 1e-9));
  r.dt = horizon / static_cast<double>(n_steps);

  std::vector<double> snaps = o.snapshot_times;
  std::sort(snaps.begin(), snaps.end());
  std::size_t next_snap = 0;
  FrontTrackedState s = initial_state(init, o.dx, r.x_max);
  std::vector<double> times, values;
  const StepOptions so{o.stefan, o.blowup_thresh};

  auto record = [&]() {
    times.push_back(s.time);
    values.push_back(s.front);
    const auto [wm, wp] = front_slopes(s);
    r.fluxes.push_back({s.time, s.front, wm, wp});
    while (next_snap < snaps.size() && s.time >= snaps[next_snap] - 0.5 * r.dt) {
      r.snapshots.push_back(s.field());
      ++next_snap;
    }
  };
  record();
  double zeta = kInf;
  for (std::size_t n = 1; n <= n_steps; ++n) {
    StepInfo info;
    FrontTrackedState next = pde_step(s, r.dt, so, &info);
    r.remap_warning = r.remap_warning || info.remap_warning;
    if (info.blowup) {
      r.blowup_time = s.time;
      break;
    }
    if (info.zeta) {
      zeta = s.time + r.dt;
      break;
    }
    if (next.front > s.front) r.monotone = false;
    s = std::move(next);
    s.time = static_cast<double>(n) * r.dt;
    record();
  }
  r.boundary = Boundary::from_values(times, values, init.lambda0minus);
  r.boundary.zeta = zeta;
  return r;
}

std::vector<double> mass_balance_residual(const std::vector<FluxRecord>& f) {
  std::vector<double> out;
  if (f.size() < 2) return out;
  out.reserve(f.size() - 1);
  auto g = [](const FluxRecord& r) { return 0.5 * r.lambda * r.lambda * (r.wx_minus - r.wx_plus); };
  for (std::size_t k = 0; k + 1 < f.size(); ++k) {
    const double dt = f[k + 1].t - f[k].t;
    const double dv = (std::pow(f[k + 1].lambda, 3) - std::pow(f[k].lambda, 3)) / 3.0;
    out.push_back(std::abs(dv - 0.5 * dt * (g(f[k]) + g(f[k + 1]))));
  }
  return out;
}

void write_snapshots_csv(std::ostream& out, const std::vector<TemperatureField>& snapshots) {
  out << "t,x,w,phase\n";
  for (const TemperatureField& f : snapshots)
    for (std::size_t i = 0; i < f.radii.size(); ++i)
      out << format_double(f.time) << ',' << format_double(f.radii[i]) << ',' << format_double(f.values[i])
          << ',' << node_phase_name(f.phases[i]) << '\n';
}

}  // namespace stefan
