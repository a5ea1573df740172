#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>

#include "stefan/diagnostics.hpp"
#include "stefan/stochastic.hpp"

namespace stefan {

namespace {

using Vec3 = std::array<double, 3>;

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
Vec3 axpy(double s, const Vec3& a, const Vec3& b) { return {s * a[0] + b[0], s * a[1] + b[1], s * a[2] + b[2]}; }
Vec3 scale(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

// max over unit q ⊥ v of q·x
double orth_max(const Vec3& x, const Vec3& v) { return norm(axpy(-dot(x, v), v, x)); }

double orth_max_grid(const Vec3& x, const Vec3& v, const Vec3& seed, int points) {
  Vec3 e1 = axpy(-dot(seed, v), v, seed);
  e1 = scale(1.0 / norm(e1), e1);
  const Vec3 e2 = cross(v, e1);
  const double a = dot(x, e1), b = dot(x, e2);
  double best = -kInf;
  for (int j = 0; j < points; ++j) {
    const double th = 2.0 * std::numbers::pi * j / points;
    best = std::max(best, std::cos(th) * a + std::sin(th) * b);
  }
  return best;
}

const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

// ∫_{-∞}^m g(b) e^{-μb - μ²s/2} 2(2m-b)/(s√(2πs)) e^{-(2m-b)²/(2s)} db, written in u = m - b
template <class G>
double reflected_inner(double m, double mu, double s, G g) {
  boost::math::quadrature::exp_sinh<double> integrator;
  auto f = [&](double u) {
    const double r = m + u;
    return g(m - u) * std::exp(-mu * (m - u) - 0.5 * mu * mu * s - r * r / (2.0 * s)) * 2.0 * r /
           (s * std::sqrt(2.0 * std::numbers::pi * s));
  };
  return integrator.integrate(f);
}

template <class G>
double reflected_average(double y, double mu, double s, G g) {
  auto outer = [&](double m) { return reflected_inner(m, mu, s, g); };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(outer, 0.0, y, 15, 1e-13) / y;
}

std::string fmt(double v) {
  std::string s = std::to_string(v);
  while (s.size() > 1 && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

}  // namespace

ConeSweep cone_volume_sweep(int na, int nd, int nr) {
  require(na >= 2 && nd >= 2 && nr >= 2, ErrorCode::domain_error, "sweep needs at least 2 points per axis");
  ConeSweep out;
  out.c_fit = -kInf;
  for (int k = 0; k < nr; ++k) {
    const long double r = 0.5L + 1.5L * k / (nr - 1);
    for (int i = 0; i < na; ++i) {
      const long double a = 0.1L * i / (na - 1);
      const long double s = std::sin(a), c = std::cos(a);
      for (int j = 0; j < nd; ++j) {
        const long double d = 0.05L * j / (nd - 1);
        const long double lhs = std::pow((r + d) * (r + d) - r * r * s * s, 1.5L) - r * r * r * c * c * c;
        const long double rhs = (r + d) * (r + d) * (r + d) - r * r * r - r * r / 4.0L * d * a * a;
        if (i == 0 || j == 0) {
          out.identity_error = std::max(out.identity_error, static_cast<double>(std::fabs(lhs - rhs)));
          continue;
        }
        const double ratio = static_cast<double>((lhs - rhs) / (d * a * a * a * a));
        if (ratio > out.c_fit) {
          out.c_fit = ratio;
          out.at_alpha = static_cast<double>(a);
          out.at_delta = static_cast<double>(d);
          out.at_radius = static_cast<double>(r);
        }
      }
    }
  }
  return out;
}

RotationCheck rotation_perturbation_check(std::size_t triples, int q_points, const RngStream& stream) {
  RotationCheck r;
  r.triples = triples;
  for (std::size_t i = 0; i < triples; ++i) {
    const auto g0 = stream.normals(i, 0), g1 = stream.normals(i, 1), g2 = stream.normals(i, 2);
    const Vec3 x{g0[0], g0[1], g0[2]};
    Vec3 v{g1[0], g1[1], g1[2]};
    v = scale(1.0 / norm(v), v);
    Vec3 w = axpy(-dot(Vec3{g2[0], g2[1], g2[2]}, v), v, Vec3{g2[0], g2[1], g2[2]});
    w = scale(1.0 / norm(w), w);
    // the first triple pins β = 0
    const double beta = i == 0 ? 0.0 : 0.5 * std::numbers::pi * stream.uniforms(i, 0, Purpose::aux)[0];
    const Vec3 vp = axpy(std::cos(beta), v, scale(std::sin(beta), w));
    const double lhs = orth_max(x, vp);
    const double rhs = orth_max(x, v) + std::sqrt(2.0) * beta * norm(x);
    const double lhs_grid = orth_max_grid(x, vp, Vec3{g0[3], g1[3], g2[3]}, q_points);
    r.grid_gap = std::max(r.grid_gap, lhs - lhs_grid);
    r.worst_margin = std::min(r.worst_margin, rhs - std::max(lhs, lhs_grid));
    if (i == 0) r.zero_angle_error = std::abs(lhs - rhs);
  }
  r.pass = r.worst_margin >= -1e-12;
  return r;
}

std::vector<QuadratureCase> brownian_density_checks(double tol) {
  std::vector<QuadratureCase> out;
  auto add = [&](std::string name, double lhs, double rhs, bool equality) {
    const bool pass = equality ? std::abs(lhs - rhs) <= tol : lhs <= rhs + tol;
    out.push_back({std::move(name), lhs, rhs, equality, pass});
  };
  for (double mu : {0.0, 1.0, 3.0}) {
    boost::math::quadrature::sinh_sinh<double> integrator;
    auto f = [mu](double b) { return std::exp(mu * b - 0.5 * mu * mu - 0.5 * b * b) * kInvSqrt2Pi; };
    add("gaussian_tilt_mass(mu=" + fmt(mu) + ")", integrator.integrate(f), 1.0, true);
  }
  for (double mu : {0.0, 0.5, 1.0, 3.0})
    for (double s : {0.01, 0.1, 1.0, 4.0}) {
      boost::math::quadrature::exp_sinh<double> integrator;
      const double rs = std::sqrt(s);
      auto f = [&](double b) { return std::exp(mu * rs * b - 0.5 * mu * mu * s - 0.5 * b * b) * b * kInvSqrt2Pi / rs; };
      add("gaussian_tilt_first_moment(mu=" + fmt(mu) + ",s=" + fmt(s) + ")", integrator.integrate(f),
          kInvSqrt2Pi / rs + mu, false);
    }
  for (double mu : {0.0, 1.0, 3.0})
    for (double s : {0.1, 1.0})
      for (double y : {0.1, 1.0}) {
        const double lhs = reflected_average(y, mu, s, [](double) { return 1.0; });
        add("reflected_density_average(mu=" + fmt(mu) + ",s=" + fmt(s) + ",y=" + fmt(y) + ")", lhs,
            2.0 * (kInvSqrt2Pi / std::sqrt(s) + mu), false);
      }
  for (double rho : {0.25, 0.5, 1.0})
    for (double mu : {0.0, 1.0, 3.0})
      for (double s : {0.1, 1.0})
        for (double y : {0.1, 1.0}) {
          const double lhs = reflected_average(y, mu, s, [&](double b) { return std::pow(y - b, rho); });
          const double rhs = 2.0 * std::pow(y, rho) * (kInvSqrt2Pi / std::sqrt(s) + mu) +
                             2.0 * std::pow(s, 0.5 * (rho - 1.0)) * (2.0 + mu * mu * s);
          add("reflected_density_weighted(rho=" + fmt(rho) + ",mu=" + fmt(mu) + ",s=" + fmt(s) + ",y=" + fmt(y) + ")",
              lhs, rhs, false);
        }
  return out;
}

DiagnosticsReport inequality_suite(const InequalityOptions& o) {
  DiagnosticsReport rep;
  const ConeSweep base = cone_volume_sweep(o.cone_alpha_points, o.cone_delta_points, o.cone_radius_points);
  const ConeSweep fine =
      cone_volume_sweep(2 * o.cone_alpha_points - 1, 2 * o.cone_delta_points - 1, 2 * o.cone_radius_points - 1);
  rep.add("cone_expansion_identity", std::max(base.identity_error, fine.identity_error) <= 1e-14,
          std::max(base.identity_error, fine.identity_error), 1e-14, "alpha = 0 and delta = 0 cases are exact");
  rep.add("cone_expansion_constant", std::isfinite(base.c_fit), base.c_fit, 0.0,
          "fitted excess constant is finite");
  const double drift = std::abs(fine.c_fit - base.c_fit);
  const double drift_tol = 0.05 * std::max(1.0, std::abs(base.c_fit));
  rep.add("cone_expansion_stability", drift <= drift_tol, drift, drift_tol,
          "fitted constant stable under 2x sweep refinement");

  const RotationCheck rot = rotation_perturbation_check(o.rotation_triples, o.rotation_q_points, o.stream.substream(0));
  rep.add("rotation_perturbation", rot.pass, rot.worst_margin, -1e-12,
          "orthogonal maximum moves by at most sqrt(2) beta |x|");
  rep.add("rotation_zero_angle", rot.zero_angle_error <= 1e-12, rot.zero_angle_error, 1e-12,
          "equality at beta = 0");

  for (const QuadratureCase& c : brownian_density_checks(o.quadrature_tol))
    rep.add(c.name, c.pass, c.lhs - c.rhs, o.quadrature_tol,
            c.equality ? "Gaussian identity by quadrature" : "Gaussian density bound by quadrature");

  const std::array<std::array<double, 3>, 3> tail_cases{{{1.0, 1.0, 0.1}, {2.0, 1.0, 1.0}, {1.5, 0.5, 0.2}}};
  for (std::size_t i = 0; i < tail_cases.size(); ++i) {
    const auto [x, a, t] = tail_cases[i];
    const TailBoundReport tb = tail_bound_check(x, a, t, o.tail_paths, o.stream.substream(1 + i), o.workers);
    const double excess = std::max(tb.p_min - 3.0 * tb.p_min_se - tb.bound_min,
                                   tb.p_dev - 3.0 * tb.p_dev_se - tb.bound_dev);
    rep.add("bessel_tail_bound(x=" + fmt(x) + ",a=" + fmt(a) + ",t=" + fmt(t) + ")", tb.pass, excess, 0.0,
            "Bessel minimum and deviation tails below their Gaussian bounds");
  }
  return rep;
}

}  // namespace stefan
