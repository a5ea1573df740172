#include "stefan/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>

#include "stefan/temperature.hpp"

namespace stefan {

const char* check_status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::inconclusive: return "inconclusive";
  }
  return "?";
}

void DiagnosticsReport::add(std::string name, bool pass, double statistic, double tolerance, std::string reference) {
  checks.push_back({std::move(name), pass ? CheckStatus::pass : CheckStatus::fail, statistic, tolerance,
                    std::move(reference)});
}

void DiagnosticsReport::add_inconclusive(std::string name, double statistic, std::string reference) {
  checks.push_back({std::move(name), CheckStatus::inconclusive, statistic, 0.0, std::move(reference)});
}

bool DiagnosticsReport::all_pass() const {
  return std::none_of(checks.begin(), checks.end(), [](const Check& c) { return c.status == CheckStatus::fail; });
}

nlohmann::json DiagnosticsReport::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const Check& c : checks)
    arr.push_back({{"name", c.name},
                   {"status", check_status_name(c.status)},
                   {"statistic", c.statistic},
                   {"tolerance", c.tolerance},
                   {"reference", c.reference}});
  return {{"checks", arr}, {"pass", all_pass()}};
}

void DiagnosticsReport::write_table(std::ostream& out) const {
  std::size_t width = 5;
  for (const Check& c : checks) width = std::max(width, c.name.size());
  out << std::left << std::setw(static_cast<int>(width)) << "check" << "  " << std::setw(12) << "status"
      << std::setw(16) << "statistic" << std::setw(16) << "tolerance" << "property\n";
  for (const Check& c : checks)
    out << std::left << std::setw(static_cast<int>(width)) << c.name << "  " << std::setw(12)
        << check_status_name(c.status) << std::setw(16) << std::setprecision(6) << c.statistic << std::setw(16)
        << c.tolerance << c.reference << '\n';
}

namespace {

struct Line {
  double slope = 0.0;
  double slope_se = 0.0;
};

Line fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  Line l;
  l.slope = sxy / sxx;
  if (x.size() > 2) {
    double ssr = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - my - l.slope * (x[i] - mx);
      ssr += r * r;
    }
    l.slope_se = std::sqrt(ssr / (n - 2.0) / sxx);
  }
  return l;
}

}  // namespace

HolderFit holder_exponent(const Boundary& b, double t_lo, double t_hi) {
  std::vector<double> t, v;
  for (std::size_t k = 0; k < b.size(); ++k)
    if (b.times[k] >= t_lo && b.times[k] <= t_hi) {
      t.push_back(b.times[k]);
      v.push_back(b.values[k]);
    }
  require(t.size() >= 32, ErrorCode::coverage, "Hölder fit needs at least 32 nodes in the window");
  HolderFit fit;
  std::vector<double> lx, ly;
  for (std::size_t lag = 1; lag <= t.size() / 4; lag *= 2) {
    double omega = 0.0, span = 0.0;
    for (std::size_t i = 0; i + lag < t.size(); ++i) {
      omega = std::max(omega, std::abs(v[i + lag] - v[i]));
      span += t[i + lag] - t[i];
    }
    span /= static_cast<double>(t.size() - lag);
    fit.lags.push_back(span);
    fit.moduli.push_back(omega);
    if (omega > 0.0) {
      lx.push_back(std::log(span));
      ly.push_back(std::log(omega));
    }
  }
  if (lx.size() < 2) {
    // a constant boundary is Hölder of every order
    fit.exponent = kInf;
    return fit;
  }
  const Line l = fit_line(lx, ly);
  fit.exponent = l.slope;
  fit.fit_error = l.slope_se;
  return fit;
}

std::vector<StefanResidualEntry> stefan_residual(const Boundary& b, const std::vector<TemperatureField>& fields,
                                                 double h) {
  std::vector<StefanResidualEntry> out;
  for (const TemperatureField& f : fields) {
    StefanResidualEntry e;
    e.t = f.time;
    const auto it = std::lower_bound(b.times.begin(), b.times.end(), f.time);
    const auto k = static_cast<std::size_t>(it - b.times.begin());
    require(k < b.size(), ErrorCode::domain_error, "field time beyond the boundary grid");
    const std::size_t lo = k == 0 ? 0 : k - 1;
    const std::size_t hi = std::min(k + 1, b.size() - 1);
    const double tl = b.times[lo], th = b.times[hi];
    e.lambda_prime = (b.left_limit_at(th) - b.at(tl)) / (th - tl);
    const double lambda_t = b.at(f.time);
    e.wx_minus = boundary_slope(f, lambda_t, Side::minus, h);
    e.wx_plus = boundary_slope(f, lambda_t, Side::plus, h);
    const double rate = 0.5 * e.wx_minus - 0.5 * e.wx_plus;
    e.residual = std::abs(e.lambda_prime - rate);
    const double scale = std::max(std::abs(e.lambda_prime), std::abs(rate));
    e.relative = scale > 0.0 ? e.residual / scale : 0.0;
    out.push_back(e);
  }
  return out;
}

double default_hysteresis(const TemperatureField& f) {
  double m = 0.0;
  for (double s : f.std_errors) m = std::max(m, s);
  return 4.0 * m;
}

int monotonicity_changes(const TemperatureField& f, double eps, double lo, double hi) {
  std::vector<double> seq;
  for (std::size_t i = f.radii.size(); i-- > 0;) {
    const double x = f.radii[i];
    if (f.phases[i] != NodePhase::solid || x <= lo || x >= hi) continue;
    seq.push_back(f.values[i]);
  }
  if (seq.empty()) return 0;
  int dir = 0, changes = 0;
  double ext = seq[0], run_hi = seq[0], run_lo = seq[0];
  for (double v : seq) {
    if (dir == 0) {
      run_hi = std::max(run_hi, v);
      run_lo = std::min(run_lo, v);
      if (v - run_lo > eps) {
        dir = 1;
        ext = v;
      } else if (run_hi - v > eps) {
        dir = -1;
        ext = v;
      }
    } else if (dir > 0) {
      if (v > ext) {
        ext = v;
      } else if (ext - v > eps) {
        dir = -1;
        ext = v;
        ++changes;
      }
    } else {
      if (v < ext) {
        ext = v;
      } else if (v - ext > eps) {
        dir = 1;
        ext = v;
        ++changes;
      }
    }
  }
  return changes;
}

PositivityReport positivity_and_bounds(const std::vector<TemperatureField>& fields, const Boundary& b,
                                       const InitialData& init) {
  PositivityReport r;
  r.solid_checked = init.profile.nu_integral(init.r0, init.lambda0minus) > 0.0;
  const double c_bar = init.decay_constant();
  const double sup = init.sup_norm();
  for (const TemperatureField& f : fields) {
    const double lt = b.at(f.time);
    for (std::size_t i = 0; i < f.radii.size(); ++i) {
      const double x = f.radii[i];
      const double w = f.values[i];
      const double se = f.std_errors.empty() ? 0.0 : f.std_errors[i];
      if (x > init.r0 && x < lt) {
        if (!r.solid_checked) continue;
        ++r.solid_points;
        const double z = se > 0.0 ? w / se : (w > 0.0 ? kInf : 0.0);
        r.min_solid_z = std::min(r.min_solid_z, z);
        if (!(w > 3.0 * se)) r.solid_positive = false;
      } else if (x > lt) {
        const double excess = w - c_bar / x - 3.0 * se;
        r.max_decay_excess = std::max(r.max_decay_excess, excess);
        if (excess > 0.0) r.decay_ok = false;
        if (f.time > 0.0) {
          const double bound = 2.0 * sup * (1.0 / std::sqrt(2.0 * std::numbers::pi * f.time) + 1.0 / lt);
          const double ratio = (w - 3.0 * se) / ((x - lt) * bound);
          r.max_slope_ratio = std::max(r.max_slope_ratio, ratio);
          if (ratio > 1.0) r.slope_ok = false;
        }
      }
    }
  }
  return r;
}

PowerFit near_boundary_exponent(const TemperatureField& f, double y_max) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < f.radii.size(); ++i) {
    const double y = f.boundary - f.radii[i];
    if (f.phases[i] != NodePhase::solid || y <= 0.0 || y > y_max || !(f.values[i] > 0.0)) continue;
    lx.push_back(std::log(y));
    ly.push_back(std::log(f.values[i]));
  }
  PowerFit p;
  p.points = lx.size();
  require(lx.size() >= 3, ErrorCode::coverage, "near-boundary fit needs at least 3 positive solid nodes");
  const Line l = fit_line(lx, ly);
  p.exponent = l.slope;
  p.fit_error = l.slope_se;
  return p;
}

}  // namespace stefan
