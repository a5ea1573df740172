#include "stefan/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace stefan {

namespace {

double cube(double x) { return x * x * x; }

// sign of the integrand far out on an unbounded piece
double tail_sign(const Segment& s) {
  switch (s.kind) {
    case SegmentKind::constant: return s.c0;
    case SegmentKind::linear: return s.c1 != 0.0 ? s.c1 : s.c0;
    case SegmentKind::rational_tail: return s.c0;
  }
  return 0.0;
}

int sgn(double x, double tol = 0.0) { return x > tol ? 1 : (x < -tol ? -1 : 0); }

}  // namespace

double Segment::value(double x) const {
  switch (kind) {
    case SegmentKind::constant: return c0;
    case SegmentKind::linear: return c0 + c1 * x;
    case SegmentKind::rational_tail: return c0 * (x - anchor) / (x * x);
  }
  return 0.0;
}

double Segment::derivative(double x) const {
  switch (kind) {
    case SegmentKind::constant: return 0.0;
    case SegmentKind::linear: return c1;
    case SegmentKind::rational_tail: return c0 * (2.0 * anchor - x) / cube(x);
  }
  return 0.0;
}

double Segment::nu_mass(double a, double b) const {
  if (std::isinf(b)) {
    const double s = tail_sign(*this);
    return s == 0.0 ? 0.0 : std::copysign(kInf, s);
  }
  switch (kind) {
    case SegmentKind::constant: return c0 * (cube(b) - cube(a)) / 3.0;
    case SegmentKind::linear:
      return c0 * (cube(b) - cube(a)) / 3.0 + c1 * (cube(b) * b - cube(a) * a) / 4.0;
    case SegmentKind::rational_tail: {
      // w x^2 = c0 (x - anchor) is linear
      const double da = a - anchor, db = b - anchor;
      return c0 * 0.5 * (db * db - da * da);
    }
  }
  return 0.0;
}

double Segment::plain_mass(double a, double b) const {
  if (std::isinf(b)) {
    const double s = tail_sign(*this);
    return s == 0.0 ? 0.0 : std::copysign(kInf, s);
  }
  switch (kind) {
    case SegmentKind::constant: return c0 * (b - a);
    case SegmentKind::linear: return c0 * (b - a) + c1 * 0.5 * (b * b - a * a);
    case SegmentKind::rational_tail:
      return c0 * (std::log(b / a) + anchor * (1.0 / b - 1.0 / a));
  }
  return 0.0;
}

PiecewiseProfile::PiecewiseProfile(std::vector<Segment> segments) : segments_(std::move(segments)) {
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const Segment& s = segments_[i];
    require(std::isfinite(s.lo) && !std::isnan(s.hi) && s.lo < s.hi, ErrorCode::domain_error,
            "profile segment " + std::to_string(i) + " has an empty or invalid range");
    require(std::isfinite(s.c0) && std::isfinite(s.c1) && std::isfinite(s.anchor),
            ErrorCode::domain_error, "profile segment " + std::to_string(i) + " has non-finite parameters");
    if (i > 0) {
      require(segments_[i - 1].hi <= s.lo, ErrorCode::domain_error,
              "profile breakpoints must be strictly ascending");
    }
  }
}

PiecewiseProfile PiecewiseProfile::constant(double lo, double hi, double c) {
  return PiecewiseProfile({Segment{lo, hi, SegmentKind::constant, c, 0.0, 0.0}});
}

PiecewiseProfile PiecewiseProfile::interpolate(std::span<const double> xs, std::span<const double> ws) {
  require(xs.size() == ws.size(), ErrorCode::domain_error, "interpolation size mismatch");
  std::vector<Segment> segs;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double x0 = xs[i], x1 = xs[i + 1];
    require(x1 >= x0, ErrorCode::domain_error, "interpolation abscissae must be non-decreasing");
    if (x1 == x0) continue;
    const double slope = (ws[i + 1] - ws[i]) / (x1 - x0);
    if (slope == 0.0) {
      segs.push_back({x0, x1, SegmentKind::constant, ws[i], 0.0, 0.0});
    } else {
      segs.push_back({x0, x1, SegmentKind::linear, ws[i] - slope * x0, slope, 0.0});
    }
  }
  return PiecewiseProfile(std::move(segs));
}

double PiecewiseProfile::operator()(double x) const {
  auto it = std::upper_bound(segments_.begin(), segments_.end(), x,
                             [](double v, const Segment& s) { return v < s.lo; });
  if (it == segments_.begin()) return 0.0;
  --it;
  return x < it->hi ? it->value(x) : 0.0;
}

bool PiecewiseProfile::is_zero() const {
  return std::all_of(segments_.begin(), segments_.end(),
                     [](const Segment& s) { return s.c0 == 0.0 && s.c1 == 0.0; });
}

double PiecewiseProfile::nu_integral(double lo, double hi) const {
  require(lo <= hi, ErrorCode::domain_error, "nu_integral requires lo <= hi");
  double total = 0.0;
  for (const Segment& s : segments_) {
    const double a = std::max(lo, s.lo), b = std::min(hi, s.hi);
    if (a < b) total += s.nu_mass(a, b);
  }
  return total;
}

double PiecewiseProfile::integral(double lo, double hi) const {
  require(lo <= hi, ErrorCode::domain_error, "integral requires lo <= hi");
  double total = 0.0;
  for (const Segment& s : segments_) {
    const double a = std::max(lo, s.lo), b = std::min(hi, s.hi);
    if (a < b) total += s.plain_mass(a, b);
  }
  return total;
}

double PiecewiseProfile::sup(double lo, double hi) const {
  double best = 0.0;
  for (const Segment& s : segments_) {
    const double a = std::max(lo, s.lo), b = std::min(hi, s.hi);
    if (!(a < b)) continue;
    best = std::max(best, std::abs(s.value(a)));
    if (std::isinf(b)) {
      if (s.kind == SegmentKind::linear && s.c1 != 0.0) return kInf;
    } else {
      best = std::max(best, std::abs(s.value(b)));
    }
    if (s.kind == SegmentKind::rational_tail) {
      const double xc = 2.0 * s.anchor;
      if (xc > a && xc < b) best = std::max(best, std::abs(s.value(xc)));
    }
  }
  return best;
}

double PiecewiseProfile::sup_times_x(double lo, double hi) const {
  double best = 0.0;
  for (const Segment& s : segments_) {
    const double a = std::max(lo, s.lo), b = std::min(hi, s.hi);
    if (!(a < b)) continue;
    auto f = [&](double x) { return s.value(x) * x; };
    best = std::max(best, f(a));
    if (std::isinf(b)) {
      switch (s.kind) {
        case SegmentKind::constant:
          if (s.c0 > 0.0) return kInf;
          break;
        case SegmentKind::linear:
          if (s.c1 > 0.0 || (s.c1 == 0.0 && s.c0 > 0.0)) return kInf;
          break;
        case SegmentKind::rational_tail: best = std::max(best, s.c0); break;
      }
    } else {
      best = std::max(best, f(b));
    }
    if (s.kind == SegmentKind::linear && s.c1 != 0.0) {
      const double xc = -s.c0 / (2.0 * s.c1);
      if (xc > a && xc < b) best = std::max(best, f(xc));
    }
  }
  return best;
}

PiecewiseProfile PiecewiseProfile::restricted(double lo, double hi) const {
  std::vector<Segment> out;
  for (Segment s : segments_) {
    s.lo = std::max(s.lo, lo);
    s.hi = std::min(s.hi, hi);
    if (s.lo < s.hi) out.push_back(s);
  }
  return PiecewiseProfile(std::move(out));
}

PiecewiseProfile PiecewiseProfile::scaled_argument(double factor) const {
  require(factor > 0.0, ErrorCode::domain_error, "scale factor must be positive");
  std::vector<Segment> out;
  for (Segment s : segments_) {
    s.lo /= factor;
    s.hi /= factor;
    switch (s.kind) {
      case SegmentKind::constant: break;
      case SegmentKind::linear: s.c1 *= factor; break;
      case SegmentKind::rational_tail:
        s.c0 /= factor;
        s.anchor /= factor;
        break;
    }
    out.push_back(s);
  }
  return PiecewiseProfile(std::move(out));
}

namespace {

// Directions (+1 / -1) of the monotone pieces of the profile on [lo, hi].
// Gaps between segments are zero pieces; jumps contribute their own direction.
std::vector<int> monotone_directions(std::span<const Segment> segs, double lo, double hi) {
  struct Piece {
    double a, b;
    const Segment* seg;  // nullptr for a zero gap
  };
  std::vector<Piece> pieces;
  double cursor = lo;
  for (const Segment& s : segs) {
    const double a = std::max(lo, s.lo), b = std::min(hi, s.hi);
    if (!(a < b)) continue;
    if (a > cursor) pieces.push_back({cursor, a, nullptr});
    pieces.push_back({a, b, &s});
    cursor = b;
  }
  if (cursor < hi) pieces.push_back({cursor, hi, nullptr});

  auto value = [](const Piece& p, double x) {
    if (!p.seg || std::isinf(x)) return 0.0;
    return p.seg->value(x);
  };
  std::vector<int> dirs;
  auto push = [&](int d) {
    if (d != 0) dirs.push_back(d);
  };
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const Piece& p = pieces[i];
    if (i > 0) {
      const double before = value(pieces[i - 1], p.a), after = value(p, p.a);
      push(sgn(after - before, 1e-14 * (1.0 + std::abs(before))));
    }
    if (!p.seg) continue;
    const Segment& s = *p.seg;
    switch (s.kind) {
      case SegmentKind::constant: break;
      case SegmentKind::linear: push(sgn(s.c1)); break;
      case SegmentKind::rational_tail: {
        const double xc = 2.0 * s.anchor;
        if (xc > p.a && xc < p.b) {
          push(sgn(s.c0));
          push(-sgn(s.c0));
        } else {
          push(sgn(s.derivative(std::isinf(p.b) ? p.a + 1.0 : 0.5 * (p.a + p.b))));
        }
        break;
      }
    }
  }
  return dirs;
}

}  // namespace

int PiecewiseProfile::monotonicity_changes(double lo, double hi) const {
  const auto dirs = monotone_directions(segments_, lo, hi);
  int changes = 0;
  for (std::size_t i = 1; i < dirs.size(); ++i) changes += dirs[i] != dirs[i - 1];
  return changes;
}

bool PiecewiseProfile::is_non_increasing(double lo, double hi) const {
  const auto dirs = monotone_directions(segments_, lo, hi);
  return std::none_of(dirs.begin(), dirs.end(), [](int d) { return d > 0; });
}

double nu_integral(double lo, double hi, const PiecewiseProfile& weight) {
  require(lo >= 0.0, ErrorCode::domain_error, "nu_integral requires lo >= 0");
  return weight.nu_integral(lo, hi);
}

double nu_integral(double lo, double hi, double weight) {
  require(lo >= 0.0 && lo <= hi, ErrorCode::domain_error, "nu_integral requires 0 <= lo <= hi");
  if (weight == 0.0) return 0.0;
  return weight * (cube(hi) - cube(lo)) / 3.0;
}

double InitialData::decay_constant() const { return profile.sup_times_x(lambda0minus, kInf); }

double InitialData::sup_norm() const { return profile.sup(r0, kInf); }

bool ValidationReport::violates(const std::string& clause) const {
  return std::any_of(issues.begin(), issues.end(),
                     [&](const ValidationIssue& i) { return i.clause == clause; });
}

namespace {

// min over [a, b] of p(x) = C (x - L) - w(x) x^2 for a polynomial piece
double growth_margin_min(const Segment& s, double C, double L, double a, double b) {
  auto p = [&](double x) {
    if (s.kind == SegmentKind::rational_tail) return C * (x - L) - s.c0 * (x - s.anchor);
    const double lin = s.kind == SegmentKind::linear ? s.c1 : 0.0;
    return C * (x - L) - s.c0 * x * x - lin * x * x * x;
  };
  double m = p(a);
  if (std::isinf(b)) {
    double lead;  // coefficient of the dominant power as x -> inf
    if (s.kind == SegmentKind::rational_tail) {
      lead = C - s.c0;
    } else if (s.kind == SegmentKind::linear && s.c1 != 0.0) {
      lead = -s.c1;
    } else if (s.c0 != 0.0) {
      lead = -s.c0;
    } else {
      lead = C;
    }
    if (lead < 0.0) return -kInf;
  } else {
    m = std::min(m, p(b));
  }
  if (s.kind != SegmentKind::rational_tail) {
    // p'(x) = C - 2 c0 x - 3 c1 x^2
    const double c1 = s.kind == SegmentKind::linear ? s.c1 : 0.0;
    std::vector<double> roots;
    if (c1 == 0.0) {
      if (s.c0 != 0.0) roots.push_back(C / (2.0 * s.c0));
    } else {
      const double A = -3.0 * c1, B = -2.0 * s.c0, D = B * B - 4.0 * A * C;
      if (D >= 0.0) {
        roots.push_back((-B + std::sqrt(D)) / (2.0 * A));
        roots.push_back((-B - std::sqrt(D)) / (2.0 * A));
      }
    }
    for (double r : roots)
      if (r > a && r < b) m = std::min(m, p(r));
  }
  return m;
}

double value_min(const Segment& s, double a, double b) {
  double m = s.value(a);
  if (std::isinf(b)) {
    if (tail_sign(s) < 0.0) return -kInf;
  } else {
    m = std::min(m, s.value(b));
  }
  if (s.kind == SegmentKind::rational_tail) {
    const double xc = 2.0 * s.anchor;
    if (xc > a && xc < b) m = std::min(m, s.value(xc));
  }
  return m;
}

}  // namespace

ValidationReport validate_initial_data(const InitialData& d) {
  ValidationReport report;
  auto issue = [&](const std::string& clause, const std::string& msg) {
    report.issues.push_back({clause, msg});
  };
  if (!(d.r0 > 0.0) || !std::isfinite(d.r0)) issue("structure", "r0 must be positive and finite");
  if (!(d.lambda0minus > d.r0) || !std::isfinite(d.lambda0minus))
    issue("structure", "lambda0minus must exceed r0");
  if (!(d.gamma > 0.0)) issue("structure", "gamma must be positive");
  if (!(d.growth_constant >= 0.0) || !std::isfinite(d.growth_constant))
    issue("structure", "C must be finite and non-negative");
  if (!report.ok()) return report;

  const double L = d.lambda0minus, C = d.growth_constant;
  const double tol = 1e-12;
  for (const Segment& s : d.profile.segments()) {
    std::ostringstream where;
    where << "segment [" << s.lo << ", " << s.hi << ")";
    if (s.lo < d.r0) issue("structure", where.str() + " extends below r0");
    const double a = std::max(s.lo, d.r0), b = s.hi;
    if (!(a < b)) continue;
    if (value_min(s, a, b) < -tol) issue("b.nonnegative", where.str() + " takes negative values");
    if (a < L && s.kind == SegmentKind::rational_tail && std::abs(s.c0) * (L + 1.0) > 1e300)
      issue("b.bounded", where.str() + " is unbounded in the solid");
    const double la = std::max(a, L);
    if (la < b) {
      const double scale = tol * (1.0 + std::abs(C) * la);
      if (growth_margin_min(s, C, L, la, b) < -scale)
        issue("a.growth_bound", where.str() + " exceeds C (x - lambda0minus) x^-2");
    }
  }
  report.solid_monotonicity_changes = d.profile.monotonicity_changes(d.r0, L);
  return report;
}

void require_valid(const InitialData& data) {
  const auto report = validate_initial_data(data);
  if (report.ok()) return;
  std::string msg = "initial data violates:";
  for (const auto& i : report.issues) msg += " [" + i.clause + "] " + i.message + ";";
  fail(ErrorCode::invalid_initial_data, msg);
}

double w_to_temperature(double w, double x, double gamma) {
  require(x > 0.0, ErrorCode::domain_error, "radius must be positive");
  return gamma / x - w;
}

double temperature_to_w(double temperature, double x, double gamma) {
  require(x > 0.0, ErrorCode::domain_error, "radius must be positive");
  return gamma / x - temperature;
}

ProfileSampler::ProfileSampler(const PiecewiseProfile& profile, double lo, double hi)
    : lo_(lo), hi_(hi) {
  require(lo <= hi, ErrorCode::domain_error, "sampler support must satisfy lo <= hi");
  std::vector<double> masses;
  for (const Segment& s : profile.segments()) {
    Segment p = s;
    p.lo = std::max(s.lo, lo);
    p.hi = std::min(s.hi, hi);
    if (!(p.lo < p.hi)) continue;
    const double m = p.nu_mass(p.lo, p.hi);
    require(!std::isnan(m) && m >= 0.0, ErrorCode::domain_error, "profile mass is negative");
    if (m == 0.0) continue;
    require(std::isfinite(m), ErrorCode::divergence, "profile mass is not finite on the support");
    pieces_.push_back(p);
    masses.push_back(m);
  }
  double total = 0.0;
  for (double m : masses) total += m;
  require(total > 0.0, ErrorCode::empty_mass, "profile has zero mass on the support");
  mass_ = total;
  double acc = 0.0;
  for (double m : masses) {
    acc += m;
    cumulative_.push_back(acc / total);
  }
  cumulative_.back() = 1.0;
}

double ProfileSampler::sample(double u_segment, double u_within) const {
  std::size_t k = static_cast<std::size_t>(
      std::upper_bound(cumulative_.begin(), cumulative_.end(), u_segment) - cumulative_.begin());
  k = std::min(k, pieces_.size() - 1);
  const Segment& s = pieces_[k];
  const double a = s.lo, b = s.hi;
  switch (s.kind) {
    case SegmentKind::constant:
      return std::clamp(std::cbrt(cube(a) + u_within * (cube(b) - cube(a))), a, b);
    case SegmentKind::rational_tail:
      if (a >= s.anchor) {
        const double da = a - s.anchor, db = b - s.anchor;
        return std::clamp(s.anchor + std::sqrt(da * da + u_within * (db * db - da * da)), a, b);
      }
      break;
    case SegmentKind::linear: break;
  }
  // safeguarded Newton on the monotone CDF
  const double target = u_within * s.nu_mass(a, b);
  double lo = a, hi = b, x = a + u_within * (b - a);
  for (int it = 0; it < 100; ++it) {
    const double g = s.nu_mass(a, x) - target;
    if (g > 0.0) hi = x; else lo = x;
    const double dg = s.value(x) * x * x;
    double next = dg > 0.0 ? x - g / dg : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-15 * std::max(1.0, std::abs(x)) || hi - lo <= 1e-15 * hi) {
      x = next;
      break;
    }
    x = next;
  }
  return std::clamp(x, a, b);
}

std::pair<double, double> phase_support(const InitialData& data, Phase phase, double liquid_cutoff) {
  if (phase == Phase::solid) return {data.r0, data.lambda0minus};
  return {data.lambda0minus, liquid_cutoff};
}

ProfileSample sample_from_profile(const InitialData& data, Phase phase, std::size_t count,
                                  const RngStream& stream, double liquid_cutoff) {
  const auto [lo, hi] = phase_support(data, phase, liquid_cutoff);
  const ProfileSampler sampler(data.profile, lo, hi);
  ProfileSample out;
  out.mass = sampler.mass();
  out.positions.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto u = stream.uniforms53(i, 0, Purpose::start);
    out.positions[i] = sampler.sample(u[0], u[1]);
  }
  return out;
}

Boundary Boundary::constant(std::span<const double> times, double value, double lambda0minus) {
  std::vector<double> v(times.size(), value);
  return from_values(times, v, lambda0minus);
}

Boundary Boundary::from_values(std::span<const double> times, std::span<const double> values,
                               double lambda0minus) {
  require(times.size() == values.size() && !times.empty(), ErrorCode::domain_error,
          "boundary times and values must be non-empty and equally sized");
  Boundary b;
  b.times.assign(times.begin(), times.end());
  b.values.assign(values.begin(), values.end());
  b.left_limits = b.values;
  b.left_limits[0] = lambda0minus;
  b.lambda0minus = lambda0minus;
  return b;
}

double Boundary::at(double t) const {
  if (t < times.front()) return lambda0minus;
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - times.begin()) - 1;
  if (k + 1 >= times.size() || t == times[k]) return values[k];
  const double frac = (t - times[k]) / (times[k + 1] - times[k]);
  return values[k] + frac * (left_limits[k + 1] - values[k]);
}

double Boundary::left_limit_at(double t) const {
  if (t <= times.front()) return t < times.front() ? lambda0minus : left_limits.front();
  const auto it = std::lower_bound(times.begin(), times.end(), t);
  if (it != times.end() && *it == t) return left_limits[static_cast<std::size_t>(it - times.begin())];
  return at(t);
}

std::vector<std::string> Boundary::check(double r0) const {
  std::vector<std::string> out;
  if (times.size() != values.size() || times.size() != left_limits.size() || times.empty()) {
    out.push_back("inconsistent array sizes");
    return out;
  }
  if (left_limits[0] != lambda0minus) out.push_back("left limit at t=0 must equal lambda0minus");
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (k > 0 && !(times[k] > times[k - 1])) out.push_back("times not strictly ascending");
    if (left_limits[k] < values[k]) out.push_back("left limit below value at node " + std::to_string(k));
    if (k > 0 && left_limits[k] > values[k - 1])
      out.push_back("boundary increases before node " + std::to_string(k));
    if (times[k] < zeta && !(values[k] > r0)) out.push_back("boundary reaches r0 before zeta");
  }
  return out;
}

std::vector<double> uniform_grid(double t0, double t1, std::size_t nodes) {
  require(nodes >= 2 && t1 > t0, ErrorCode::domain_error, "grid needs >= 2 nodes and t1 > t0");
  std::vector<double> g(nodes);
  for (std::size_t i = 0; i < nodes; ++i)
    g[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(nodes - 1);
  g.back() = t1;
  return g;
}

const char* node_phase_name(NodePhase phase) {
  switch (phase) {
    case NodePhase::solid: return "solid";
    case NodePhase::interface: return "interface";
    case NodePhase::liquid: return "liquid";
  }
  return "?";
}

void TemperatureField::tag_phases(double lambda_t) {
  boundary = lambda_t;
  phases.resize(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    phases[i] = radii[i] < lambda_t ? NodePhase::solid
                : radii[i] > lambda_t ? NodePhase::liquid
                                      : NodePhase::interface;
  }
}

PiecewiseProfile TemperatureField::as_profile() const {
  return PiecewiseProfile::interpolate(radii, values);
}

TemperatureField field_from_profile(const PiecewiseProfile& profile, double lo, double hi,
                                    double max_spacing) {
  require(lo < hi && std::isfinite(hi), ErrorCode::domain_error, "field range must be finite and non-empty");
  require(max_spacing > 0.0, ErrorCode::domain_error, "max_spacing must be positive");
  TemperatureField f;
  auto push = [&](double x, double w) {
    f.radii.push_back(x);
    f.values.push_back(w);
  };
  auto span_piece = [&](double a, double b, const Segment* s) {
    const double va = s ? s->value(a) : 0.0;
    if (f.radii.empty() || f.radii.back() != a || f.values.back() != va) push(a, va);
    const auto m = static_cast<std::size_t>(std::max(1.0, std::ceil((b - a) / max_spacing)));
    for (std::size_t i = 1; i <= m; ++i) {
      const double x = i == m ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(m);
      push(x, s ? s->value(x) : 0.0);
    }
  };
  double cursor = lo;
  for (const Segment& s : profile.segments()) {
    const double a = std::max(lo, s.lo), b = std::min(hi, s.hi);
    if (!(a < b)) continue;
    if (a > cursor) span_piece(cursor, a, nullptr);
    span_piece(a, b, &s);
    cursor = b;
  }
  if (cursor < hi) span_piece(cursor, hi, nullptr);
  return f;
}

}  // namespace stefan
