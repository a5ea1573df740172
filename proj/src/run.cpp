#include "stefan/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "stefan/acceptance.hpp"
#include "stefan/diagnostics.hpp"
#include "stefan/growth.hpp"
#include "stefan/io.hpp"
#include "stefan/onephase.hpp"
#include "stefan/pde.hpp"
#include "stefan/temperature.hpp"

namespace stefan {

using nlohmann::json;

namespace {

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json numbers(const std::vector<double>& xs) {
  json a = json::array();
  for (double x : xs) a.push_back(number(x));
  return a;
}

class Output {
 public:
  explicit Output(const std::string& dir) : dir_(dir) { std::filesystem::create_directories(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  void text(const std::string& name, const std::string& body) const { write_text_file(path(name), body); }
  void report(const json& j) const { text("report.json", j.dump(2) + "\n"); }

 private:
  std::filesystem::path dir_;
};

std::string boundary_csv(const Boundary& b) {
  std::ostringstream ss;
  write_boundary_csv(ss, b);
  return ss.str();
}

std::string field_csv(const TemperatureField& f) {
  std::ostringstream ss;
  write_field_csv(ss, f);
  return ss.str();
}

std::vector<double> time_grid(const RunConfig& c) { return uniform_grid(0.0, *c.horizon, c.time_nodes); }

std::vector<double> field_times(const RunConfig& c) {
  return c.field_times.empty() ? std::vector<double>{0.5 * *c.horizon} : c.field_times;
}

FixedPointOptions fixed_point_options(const RunConfig& c) {
  FixedPointOptions fo;
  fo.gamma.n_paths = static_cast<std::size_t>(c.n_paths);
  fo.gamma.stream = RngStream(*c.seed, 0);
  fo.gamma.max_step = effective_max_step(c);
  fo.gamma.workers = c.workers;
  fo.tol = c.tol_fp;
  fo.max_iterations = c.max_iterations;
  fo.jump_tol_rel = c.jump_tol;
  return fo;
}

json fixed_point_json(const FixedPointResult& r) {
  json events = json::array();
  for (const JumpEvent& e : r.jump_events) events.push_back({{"t", e.t}, {"size", e.size}});
  return {{"grid", numbers(r.boundary.times)},
          {"lambda", numbers(r.boundary.values)},
          {"lambda_se", numbers(r.boundary_se())},
          {"zeta", number(r.boundary.zeta)},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"monotone_iterates", r.monotone_iterates},
          {"changes", numbers(r.changes)},
          {"initial_jump", r.initial_jump},
          {"jump_events", events}};
}

int cmd_solve(const RunConfig& c, const Output& out, std::ostream& log) {
  const InitialData init = resolve_initial_data(c);
  const auto grid = time_grid(c);
  const FixedPointOptions fo = fixed_point_options(c);
  const FixedPointResult r = fixed_point_solve(init, grid, fo);
  log << "fixed point: " << r.iterations << " iterations, converged " << (r.converged ? "yes" : "no") << '\n';
  GammaOptions fresh = fo.gamma;
  fresh.stream = RngStream(*c.seed, 1);
  const GrowthResidual res = growth_residual(init, r.boundary, fresh);
  const double slack = init.lambda0minus * init.lambda0minus * c.tol_fp;

  out.text("lambda.csv", boundary_csv(r.boundary));
  json rep = fixed_point_json(r);
  rep["command"] = "solve";
  rep["residuals"] = numbers(res.residual);
  rep["residual_se"] = numbers(res.se);
  rep["residual_worst_ratio"] = number(res.worst_ratio(slack));
  out.report(rep);

  const auto se = r.boundary_se();
  std::ostringstream p;
  p << "t,lambda,lambda_se,residual,residual_se\n";
  for (std::size_t k = 0; k < grid.size(); ++k)
    p << format_double(grid[k]) << ',' << format_double(r.boundary.values[k]) << ',' << format_double(se[k]) << ','
      << format_double(res.residual[k]) << ',' << format_double(res.se[k]) << '\n';
  out.text("plotdata.csv", p.str());
  return 0;
}

PdeOptions pde_options(const RunConfig& c, double dx) {
  PdeOptions po;
  po.dx = dx;
  po.dt = c.dt ? *c.dt * (dx / c.dx) * (dx / c.dx) : 0.0;
  po.x_max = c.x_max.value_or(kInf);
  po.snapshot_times = field_times(c);
  return po;
}

Boundary on_grid(const Boundary& b, const std::vector<double>& grid, double lambda0minus) {
  std::vector<double> v;
  for (double t : grid) v.push_back(b.at(std::min(t, b.horizon())));
  Boundary out = Boundary::from_values(grid, v, lambda0minus);
  out.zeta = b.zeta;
  return out;
}

int cmd_pde(const RunConfig& c, const Output& out, std::ostream& log) {
  const InitialData init = resolve_initial_data(c);
  const auto grid = time_grid(c);
  const PdeResult r = pde_solve(init, *c.horizon, pde_options(c, c.dx));
  log << "finite-difference solve: " << r.fluxes.size() - 1 << " steps\n";
  const Boundary b = on_grid(r.boundary, grid, init.lambda0minus);
  out.text("lambda.csv", boundary_csv(b));
  const auto times = field_times(c);
  for (std::size_t i = 0; i < r.snapshots.size(); ++i) out.text(field_file_name(times[i]), field_csv(r.snapshots[i]));
  const auto mb = mass_balance_residual(r.fluxes);
  const double mb_max = mb.empty() ? 0.0 : *std::max_element(mb.begin(), mb.end());
  out.report({{"command", "pde"},
              {"grid", numbers(grid)},
              {"lambda", numbers(b.values)},
              {"dx", c.dx},
              {"dt", r.dt},
              {"x_max", r.x_max},
              {"steps", r.fluxes.size() - 1},
              {"blowup_time", r.blowup_time ? json(*r.blowup_time) : json(nullptr)},
              {"zeta", number(r.boundary.zeta)},
              {"monotone", r.monotone},
              {"remap_warning", r.remap_warning},
              {"mass_balance_max", mb_max}});
  std::ostringstream p;
  p << "t,lambda,wx_minus,wx_plus\n";
  for (double t : grid) {
    const auto k = std::min(r.fluxes.size() - 1, static_cast<std::size_t>(std::llround(t / r.dt)));
    p << format_double(t) << ',' << format_double(b.at(t)) << ',' << format_double(r.fluxes[k].wx_minus) << ','
      << format_double(r.fluxes[k].wx_plus) << '\n';
  }
  out.text("plotdata.csv", p.str());
  return 0;
}

int cmd_compare(const RunConfig& c, const Output& out, std::ostream& log) {
  const InitialData init = resolve_initial_data(c);
  const auto grid = time_grid(c);
  const FixedPointResult mc = fixed_point_solve(init, grid, fixed_point_options(c));
  const PdeResult coarse = pde_solve(init, *c.horizon, pde_options(c, c.dx));
  const PdeResult fine = pde_solve(init, *c.horizon, pde_options(c, 0.5 * c.dx));
  const auto se = mc.boundary_se();
  double sup_diff = 0.0, worst = 0.0;
  bool pass = true;
  std::ostringstream p;
  p << "t,lambda_mc,lambda_mc_se,lambda_pde,lambda_pde_fine,diff,richardson\n";
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double a = coarse.boundary.at(std::min(grid[k], coarse.boundary.horizon()));
    const double b = fine.boundary.at(std::min(grid[k], fine.boundary.horizon()));
    const double rich = std::abs(a - b) / 3.0;
    const double diff = std::abs(mc.boundary.values[k] - b);
    const double tol = std::max(3.0 * se[k], 2.0 * rich);
    sup_diff = std::max(sup_diff, diff);
    if (diff > 0.0) worst = std::max(worst, tol > 0.0 ? diff / tol : kInf);
    if (diff > tol) pass = false;
    p << format_double(grid[k]) << ',' << format_double(mc.boundary.values[k]) << ',' << format_double(se[k]) << ','
      << format_double(a) << ',' << format_double(b) << ',' << format_double(diff) << ',' << format_double(rich)
      << '\n';
  }
  log << "sup |MC - FD| = " << sup_diff << (pass ? " (within tolerance)\n" : " (outside tolerance)\n");
  out.text("lambda.csv", boundary_csv(mc.boundary));
  out.text("plotdata.csv", p.str());
  json rep = fixed_point_json(mc);
  rep["command"] = "compare";
  rep["lambda_pde"] = numbers(on_grid(fine.boundary, grid, init.lambda0minus).values);
  rep["sup_diff"] = sup_diff;
  rep["worst_ratio"] = number(worst);
  rep["pass"] = pass;
  out.report(rep);
  return 0;
}

std::vector<double> field_radii(const InitialData& init, double horizon, int nodes, double lambda_t) {
  const double hi = init.lambda0minus + 4.0 * std::sqrt(horizon);
  std::vector<double> r = uniform_grid(init.r0, hi, static_cast<std::size_t>(std::max(nodes, 2)));
  r.push_back(lambda_t);
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());
  return r;
}

int cmd_field(const RunConfig& c, const Output& out, std::ostream& log) {
  const InitialData init = resolve_initial_data(c);
  const auto grid = time_grid(c);
  const FixedPointResult fp = fixed_point_solve(init, grid, fixed_point_options(c));
  out.text("lambda.csv", boundary_csv(fp.boundary));
  BackwardOptions bo;
  bo.n_paths = static_cast<std::size_t>(c.n_paths);
  bo.max_step = effective_max_step(c);
  bo.workers = c.workers;
  json fields = json::array();
  std::vector<TemperatureField> all;
  std::ostringstream p;
  p << "t,x,w,se,phase\n";
  const auto times = field_times(c);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    const double lt = fp.boundary.at(t);
    bo.stream = RngStream(*c.seed, 2).substream(i);
    const TemperatureField f = sample_field(init, fp.boundary, t, field_radii(init, *c.horizon, c.field_nodes, lt), bo);
    out.text(field_file_name(t), field_csv(f));
    const double eps = c.hysteresis.value_or(default_hysteresis(f));
    fields.push_back({{"t", t}, {"lambda_t", lt}, {"hysteresis", eps}, {"monotonicity_changes",
                      monotonicity_changes(f, eps, init.r0, lt)}});
    for (std::size_t j = 0; j < f.radii.size(); ++j)
      p << format_double(t) << ',' << format_double(f.radii[j]) << ',' << format_double(f.values[j]) << ','
        << format_double(f.std_errors[j]) << ',' << node_phase_name(f.phases[j]) << '\n';
    all.push_back(f);
    log << "field at t = " << t << ": " << f.radii.size() << " nodes\n";
  }
  const PositivityReport pos = positivity_and_bounds(all, fp.boundary, init);
  json rep = fixed_point_json(fp);
  rep["command"] = "field";
  rep["fields"] = fields;
  rep["positivity"] = {{"solid_checked", pos.solid_checked},
                       {"solid_positive", pos.solid_positive},
                       {"min_solid_z", number(pos.min_solid_z)},
                       {"decay_ok", pos.decay_ok},
                       {"max_decay_excess", number(pos.max_decay_excess)},
                       {"slope_ok", pos.slope_ok},
                       {"max_slope_ratio", number(pos.max_slope_ratio)}};
  out.report(rep);
  out.text("plotdata.csv", p.str());
  return 0;
}

int cmd_jump(const RunConfig& c, const Output& out, std::ostream& log) {
  TemperatureField field;
  double lambda = 0.0, r0 = 0.0;
  if (c.field_file) {
    std::ifstream in(resolve_path(c, *c.field_file));
    require(static_cast<bool>(in), ErrorCode::io, "cannot open field file '" + *c.field_file + "'");
    field = read_field_csv(in);
    require(!field.radii.empty(), ErrorCode::coverage, "field file has no nodes");
    if (!c.initial_data.is_null()) {
      const InitialData init = resolve_initial_data(c);
      r0 = init.r0;
      lambda = c.lambda_left.value_or(init.lambda0minus);
    } else {
      r0 = field.radii.front();
      lambda = *c.lambda_left;
    }
  } else {
    const InitialData init = resolve_initial_data(c);
    r0 = init.r0;
    lambda = c.lambda_left.value_or(init.lambda0minus);
    field = field_from_profile(init.profile, r0, lambda, 1e-3);
  }
  JumpOptions jo;
  jo.jump_tol = c.jump_tol * lambda * lambda * lambda;
  const JumpResult j = compute_jump(field, lambda, r0, jo);
  log << "jump size " << j.size << '\n';
  out.report({{"command", "jump"},
              {"lambda_left", lambda},
              {"r0", r0},
              {"size", j.size},
              {"lambda_after", lambda - j.size},
              {"down", j.down},
              {"bracket", {j.bracket_lo, j.bracket_hi}},
              {"residual", j.residual},
              {"liquid_size", j.liquid_size},
              {"reaches_core", j.reaches_core}});
  const PiecewiseProfile w = field.as_profile();
  std::ostringstream p;
  p << "y,deficit\n";
  const int n = 200;
  for (int i = 1; i <= n; ++i) {
    const double y = (lambda - r0) * i / n;
    const double d = (std::pow(lambda, 3) - std::pow(lambda - y, 3)) / 3.0 - w.nu_integral(lambda - y, lambda);
    p << format_double(y) << ',' << format_double(d) << '\n';
  }
  out.text("plotdata.csv", p.str());
  return 0;
}

int cmd_onephase(const RunConfig& c, const Output& out, std::ostream& log) {
  const PiecewiseProfile f = profile_from_json(c.density, 0.0);
  OnePhaseOptions oo;
  oo.n_paths = static_cast<std::size_t>(c.n_paths);
  oo.stream = RngStream(*c.seed, 3);
  oo.tol = c.tol_fp;
  oo.max_iterations = c.max_iterations;
  oo.workers = c.workers;
  const auto grid = time_grid(c);
  const OnePhaseSolution sol = solve_one_phase(f, grid, oo);
  log << "one-phase: " << sol.iterations << " iterations\n";
  std::ostringstream csv;
  write_one_phase_csv(csv, sol);
  out.text("onephase.csv", csv.str());
  const OrderingReport sub = subadditivity_check(sol);
  json rep = {{"command", "onephase"},
              {"grid", numbers(grid)},
              {"lambda", numbers(sol.lambda)},
              {"lambda_se", numbers(sol.se)},
              {"iterations", sol.iterations},
              {"converged", sol.converged},
              {"monotone_iterates", sol.monotone_iterates},
              {"subadditivity", {{"pairs", sub.pairs}, {"worst_margin", number(sub.worst_margin)}, {"pass", sub.pass}}}};
  const auto segs = f.segments();
  if (segs.empty() || f.is_non_increasing(0.0, segs.back().hi)) {
    const ScalingReport sc = scaling_minorization_check(sol, c.q, oo);
    rep["scaling"] = {{"q", c.q},
                      {"direct_pairs", sc.direct.pairs},
                      {"direct_worst_margin", number(sc.direct.worst_margin)},
                      {"companion_worst_margin", number(sc.companion.worst_margin)},
                      {"pass", sc.pass}};
  } else {
    rep["scaling"] = {{"q", c.q}, {"skipped", "sub-density is not non-increasing"}};
  }
  out.report(rep);
  std::ostringstream p;
  p << "t,lambda,lambda_se\n";
  for (std::size_t k = 0; k < grid.size(); ++k)
    p << format_double(grid[k]) << ',' << format_double(sol.lambda[k]) << ',' << format_double(sol.se[k]) << '\n';
  out.text("plotdata.csv", p.str());
  return 0;
}

int cmd_selftest(const RunConfig& c, const Output& out, std::ostream& log) {
  AcceptanceOptions ao;
  ao.scale = c.selftest_scale;
  ao.workers = c.workers;
  ao.seed = *c.seed;
  ao.scratch_dir = out.path("selftest_scratch");
  const auto results = run_acceptance(ao, log);
  json arr = json::array();
  bool pass = true;
  std::ostringstream p;
  p << "criterion,name,pass\n";
  for (const CriterionResult& r : results) {
    arr.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
    p << r.id << ',' << r.name << ',' << (r.pass ? 1 : 0) << '\n';
    pass = pass && r.pass;
  }
  out.report({{"command", "selftest"}, {"criteria", arr}, {"pass", pass}});
  out.text("plotdata.csv", p.str());
  return pass ? 0 : 1;
}

}  // namespace

std::string field_file_name(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "field_%.6f.csv", t);
  return buf;
}

std::string error_json(const std::string& code, const std::string& message) {
  return json{{"error", {{"code", code}, {"message", message}}}}.dump();
}

int run(const RunConfig& c, std::ostream& log) {
  validate_config(c);
  const Output out(c.output_dir);
  switch (*c.command) {
    case Command::solve: return cmd_solve(c, out, log);
    case Command::pde: return cmd_pde(c, out, log);
    case Command::compare: return cmd_compare(c, out, log);
    case Command::field: return cmd_field(c, out, log);
    case Command::jump: return cmd_jump(c, out, log);
    case Command::onephase: return cmd_onephase(c, out, log);
    case Command::selftest: return cmd_selftest(c, out, log);
  }
  return 2;
}

}  // namespace stefan
