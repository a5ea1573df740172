#include "stefan/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include "stefan/config.hpp"
#include "stefan/diagnostics.hpp"
#include "stefan/growth.hpp"
#include "stefan/io.hpp"
#include "stefan/onephase.hpp"
#include "stefan/parallel.hpp"
#include "stefan/pde.hpp"
#include "stefan/run.hpp"
#include "stefan/stochastic.hpp"
#include "stefan/temperature.hpp"

namespace stefan {

namespace {

namespace fs = std::filesystem;

// Tolerances and sizes of every criterion.
constexpr double kHitX = 2.0, kHitB = 1.0, kHitT = 1.0;
constexpr double kHitOracle = 0.15865525393145707;  // Φ(-1)
constexpr std::size_t kHitPaths = 1'000'000;
constexpr double kHitSeconds = 30.0;

constexpr double kDensityT = 0.05;
constexpr std::size_t kDensityBackwardPaths = 40'000;
constexpr std::size_t kDensityForwardPaths = 400'000;
constexpr double kDensitySeconds = 120.0;

constexpr double kHorizon = 0.05;
constexpr std::size_t kNodes = 51;
constexpr std::size_t kSolvePaths = 1'000'000;
constexpr double kTolFp = 1e-7;
constexpr std::size_t kRestartFieldPaths = 20'000;
constexpr std::size_t kRestartPaths = 400'000;
constexpr double kFieldSpacing = 0.02;

constexpr double kDxCoarse = 2e-3, kDxFine = 1e-3;
constexpr double kCrossSeconds = 300.0;

constexpr double kPlateauTol = 1e-9;

constexpr double kSlopeStep = 0.025;
constexpr std::size_t kSlopePaths = 250'000;
constexpr double kStefanRelTol = 0.1;

constexpr double kHolderMin = 0.45;
constexpr double kSqrtTarget = 0.5, kSqrtTol = 0.02;

constexpr std::size_t kMonotonePaths = 200'000;
constexpr std::size_t kMonotoneFieldPaths = 20'000;
constexpr double kMonotoneSpacing = 0.025;

constexpr double kOnePhaseT = 0.04;
constexpr std::size_t kOnePhaseNodes = 17;
constexpr std::size_t kOnePhasePaths = 100'000;
constexpr double kOnePhaseQ = 0.25;

constexpr double kContractionT = 0.01;
constexpr std::size_t kContractionPaths = 200'000;

constexpr std::size_t kTailPaths = 200'000;

constexpr std::size_t kDeterminismPaths = 20'000;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

class Detail {
 public:
  Detail& add(const std::string& key, double v) {
    if (!s_.empty()) s_ += ", ";
    s_ += key + "=" + fmt("%.4g", v);
    return *this;
  }
  Detail& note(const std::string& text) {
    if (!s_.empty()) s_ += ", ";
    s_ += text;
    return *this;
  }
  std::string str() const { return s_; }

 private:
  std::string s_;
};

CriterionResult criterion(int id, const char* name) {
  CriterionResult r;
  r.id = id;
  r.name = name;
  return r;
}

std::size_t scaled(std::size_t n, double scale) {
  return std::max<std::size_t>(1000, static_cast<std::size_t>(std::llround(static_cast<double>(n) * scale)));
}

InitialData base_data() {
  InitialData d;
  d.r0 = 1.0;
  d.lambda0minus = 2.0;
  d.gamma = 1.0;
  return d;
}

InitialData solid_bump() {
  InitialData d = base_data();
  const std::vector<double> xs{1.0, 1.5, 2.0}, ws{0.0, 0.5, 0.0};
  d.profile = PiecewiseProfile::interpolate(xs, ws);
  return d;
}

InitialData two_change() {
  InitialData d = base_data();
  const std::vector<double> xs{1.0, 1.3, 1.6, 2.0}, ws{0.5, 0.2, 0.6, 0.0};
  d.profile = PiecewiseProfile::interpolate(xs, ws);
  return d;
}

InitialData two_phase() {
  InitialData d = solid_bump();
  d.growth_constant = 0.5;
  std::vector<Segment> segs(d.profile.segments().begin(), d.profile.segments().end());
  segs.push_back({2.0, kInf, SegmentKind::rational_tail, 0.5, 0.0, 2.0});
  d.profile = PiecewiseProfile(segs);
  return d;
}

InitialData plateau(double level) {
  InitialData d = base_data();
  d.profile = PiecewiseProfile::constant(1.8, 2.0, level);
  return d;
}

struct Shared {
  InitialData init = solid_bump();
  std::vector<double> grid;
  FixedPointOptions options;
  std::optional<FixedPointResult> solution;
  double solve_seconds = 0.0;
  std::optional<PdeResult> pde_coarse, pde_fine;
  double pde_seconds = 0.0;
};

class Suite {
 public:
  Suite(const AcceptanceOptions& o, std::ostream& log) : o_(o), log_(log) {
    sh_.grid = uniform_grid(0.0, kHorizon, kNodes);
    sh_.options.gamma.n_paths = scaled(kSolvePaths, o.scale);
    sh_.options.gamma.stream = RngStream(o.seed, 1000);
    sh_.options.gamma.workers = o.workers;
    sh_.options.tol = kTolFp;
  }

  const FixedPointResult& solution() {
    if (!sh_.solution) {
      const auto t0 = std::chrono::steady_clock::now();
      sh_.solution = fixed_point_solve(sh_.init, sh_.grid, sh_.options);
      sh_.solve_seconds = seconds_since(t0);
    }
    return *sh_.solution;
  }

  const PdeResult& pde(bool fine) {
    if (!sh_.pde_fine) {
      const auto t0 = std::chrono::steady_clock::now();
      PdeOptions po;
      po.dx = kDxCoarse;
      sh_.pde_coarse = pde_solve(sh_.init, kHorizon, po);
      po.dx = kDxFine;
      sh_.pde_fine = pde_solve(sh_.init, kHorizon, po);
      sh_.pde_seconds = seconds_since(t0);
    }
    return fine ? *sh_.pde_fine : *sh_.pde_coarse;
  }

  CriterionResult c1();
  CriterionResult c2();
  CriterionResult c3();
  CriterionResult c4();
  CriterionResult c5();
  CriterionResult c6();
  CriterionResult c7();
  CriterionResult c8();
  CriterionResult c9();
  CriterionResult c10();
  CriterionResult c11();
  CriterionResult c12();

 private:
  std::size_t n(std::size_t base) const { return scaled(base, o_.scale); }
  RngStream stream(std::uint64_t id) const { return RngStream(o_.seed, id); }

  const AcceptanceOptions& o_;
  std::ostream& log_;
  Shared sh_;
};

CriterionResult Suite::c1() {
  CriterionResult r = criterion(1, "bessel_hitting_oracle");
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t paths = n(kHitPaths);
  const BarrierSchedule barrier = constant_schedule(kHitB, kHitT, kInf);
  const RngStream s = stream(1);
  const std::size_t chunks = (paths + kReductionChunk - 1) / kReductionChunk;
  std::vector<double> hits(chunks, 0.0);
  parallel_chunks(paths, kReductionChunk, o_.workers, [&](std::size_t c, std::size_t b, std::size_t e) {
    double h = 0.0;
    for (std::size_t i = b; i < e; ++i)
      if (simulate_path(kHitX, barrier, 0.5 * kHitB, s, i, true, false).crossed()) h += 1.0;
    hits[c] = h;
  });
  const double p = pairwise_sum(hits) / static_cast<double>(paths);
  const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(paths));
  const double secs = seconds_since(t0);
  const double z = std::abs(p - kHitOracle) / se;
  r.pass = z <= 3.0 && secs < kHitSeconds;
  r.detail = Detail().add("p_mc", p).add("oracle", kHitOracle).add("se", se).add("z", z).add("limit_z", 3.0)
                 .add("runtime_s", secs).add("limit_s", kHitSeconds).str();
  return r;
}

CriterionResult Suite::c2() {
  CriterionResult r = criterion(2, "time_reversal_identity");
  const auto t0 = std::chrono::steady_clock::now();
  const InitialData init = two_phase();
  const std::vector<double> grid = uniform_grid(0.0, kDensityT, 11);
  std::vector<double> moving(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) moving[k] = 2.0 - grid[k];
  const Boundary flat = Boundary::constant(grid, 2.0, 2.0);
  const Boundary slope = Boundary::from_values(grid, moving, 2.0);

  double worst = 0.0;
  std::size_t bins = 0;
  int fixture = 0;
  for (const Boundary* b : {&flat, &slope}) {
    const double lt = b->at(kDensityT);
    const double top = init.lambda0minus + 4.0 * std::sqrt(kDensityT);
    std::vector<double> edges = uniform_grid(init.r0, lt, 11);
    const std::vector<double> liquid = uniform_grid(lt, top, 11);
    edges.insert(edges.end(), liquid.begin() + 1, liquid.end());
    BackwardOptions bo;
    bo.n_paths = n(kDensityBackwardPaths);
    bo.stream = stream(20 + fixture);
    bo.max_step = kDensityT / 100.0;
    bo.workers = o_.workers;
    ForwardOptions fo;
    fo.n_paths = n(kDensityForwardPaths);
    fo.stream = stream(30 + fixture);
    fo.max_step = kDensityT / 100.0;
    fo.workers = o_.workers;
    for (const BinResidual& br : density_identity_residual(init, *b, kDensityT, edges, bo, fo)) {
      ++bins;
      if (br.combined_se > 0.0) worst = std::max(worst, br.residual / br.combined_se);
      else if (br.residual > 0.0) worst = kInf;
    }
    ++fixture;
  }
  const double secs = seconds_since(t0);
  r.pass = worst <= 3.0 && secs < kDensitySeconds;
  r.detail = Detail().add("bins", static_cast<double>(bins)).add("max_residual_over_se", worst).add("limit", 3.0)
                 .add("runtime_s", secs).add("limit_s", kDensitySeconds).str();
  return r;
}

CriterionResult Suite::c3() {
  CriterionResult r = criterion(3, "growth_self_consistency");
  const FixedPointResult& fp = solution();
  const double slack = sh_.init.lambda0minus * sh_.init.lambda0minus * kTolFp;

  GammaOptions fresh = sh_.options.gamma;
  fresh.stream = stream(40);
  const GrowthResidual res = growth_residual(sh_.init, fp.boundary, fresh);
  double worst = 0.0;
  for (std::size_t k = 0; k < res.residual.size(); ++k) {
    const double se = std::hypot(res.se[k], fp.last_gamma.volume_se(k));
    worst = std::max(worst, res.residual[k] / (se + slack));
  }

  const std::size_t k0 = (kNodes - 1) / 2;
  const double t0 = sh_.grid[k0];
  const double lt = fp.boundary.values[k0];
  std::vector<double> radii;
  for (double x = sh_.init.r0 + kFieldSpacing; x < lt - 0.5 * kFieldSpacing; x += kFieldSpacing) radii.push_back(x);
  radii.push_back(lt);
  for (int i = 1; i <= 3; ++i) radii.push_back(lt + kFieldSpacing * i);
  BackwardOptions bo;
  bo.n_paths = n(kRestartFieldPaths);
  bo.stream = stream(41);
  bo.max_step = sh_.grid[1];
  bo.workers = o_.workers;
  const TemperatureField field = sample_field(sh_.init, fp.boundary, t0, radii, bo);
  GammaOptions ro = sh_.options.gamma;
  ro.n_paths = n(kRestartPaths);
  ro.stream = stream(42);
  const GrowthResidual rr = restart_residual(sh_.init, fp.boundary, k0, field, ro);
  double worst_restart = 0.0;
  const double v0 = fp.last_gamma.volume_se(k0);
  for (std::size_t i = 0; i < rr.residual.size(); ++i) {
    const double vk = fp.last_gamma.volume_se(k0 + i);
    const double se = std::sqrt(rr.se[i] * rr.se[i] + std::abs(vk * vk - v0 * v0));
    worst_restart = std::max(worst_restart, rr.residual[i] / (se + slack));
  }
  r.pass = fp.converged && worst <= 3.0 && worst_restart <= 3.0;
  r.detail = Detail().add("iterations", fp.iterations).add("max_residual_ratio", worst)
                 .add("max_restart_ratio", worst_restart).add("limit", 3.0).add("t0", t0).str();
  return r;
}

CriterionResult Suite::c4() {
  CriterionResult r = criterion(4, "cross_oracle_agreement");
  const FixedPointResult& fp = solution();
  const PdeResult& coarse = pde(false);
  const PdeResult& fine = pde(true);
  const auto se = fp.boundary_se();
  double worst = 0.0, sup = 0.0, sup_rich = 0.0;
  for (std::size_t k = 0; k < sh_.grid.size(); ++k) {
    const double t = sh_.grid[k];
    const double a = coarse.boundary.at(t), b = fine.boundary.at(t);
    const double rich = std::abs(a - b) / 3.0;
    const double diff = std::abs(fp.boundary.values[k] - b);
    const double tol = std::max(3.0 * se[k], 2.0 * rich);
    sup = std::max(sup, diff);
    sup_rich = std::max(sup_rich, rich);
    if (diff > 0.0) worst = std::max(worst, tol > 0.0 ? diff / tol : kInf);
  }
  const double secs = sh_.solve_seconds + sh_.pde_seconds;
  r.pass = worst <= 1.0 && secs < kCrossSeconds;
  r.detail = Detail().add("sup_diff", sup).add("max_diff_over_tol", worst).add("limit", 1.0)
                 .add("sup_richardson", sup_rich).add("runtime_s", secs).add("limit_s", kCrossSeconds).str();
  return r;
}

CriterionResult Suite::c5() {
  CriterionResult r = criterion(5, "physical_jump");
  const double two = 2.0 - std::cbrt(2.0 * 1.8 * 1.8 * 1.8 - 8.0);
  const double one = 0.2;
  double worst = 0.0;
  Detail d;
  for (const auto& [level, oracle] : {std::pair{2.0, two}, std::pair{1.0, one}}) {
    const InitialData init = plateau(level);
    JumpOptions jo;
    jo.jump_tol = 1e-10 * std::pow(init.lambda0minus, 3);
    jo.bisection_tol = kPlateauTol;
    for (double h : {1e-3, 5e-4}) {
      const TemperatureField f = field_from_profile(init.profile, init.r0, init.lambda0minus, h);
      const JumpResult j = compute_jump(f, init.lambda0minus, init.r0, jo);
      worst = std::max(worst, std::abs(j.size - oracle));
      if (h == 1e-3) d.add("jump_w" + fmt("%.0f", level), j.size).add("oracle_w" + fmt("%.0f", level), oracle);
    }
  }
  r.pass = worst <= 2.0 * kPlateauTol;
  r.detail = d.add("max_error", worst).add("limit", 2.0 * kPlateauTol).str();
  return r;
}

CriterionResult Suite::c6() {
  CriterionResult r = criterion(6, "stefan_condition");
  const FixedPointResult& fp = solution();
  std::vector<TemperatureField> fields;
  BackwardOptions bo;
  bo.n_paths = n(kSlopePaths);
  bo.max_step = sh_.grid[1];
  bo.workers = o_.workers;
  int i = 0;
  for (double t : {0.015, 0.025, 0.035}) {
    const double lt = fp.boundary.at(t);
    std::vector<double> radii;
    for (int j = -2; j <= 2; ++j) radii.push_back(lt + j * kSlopeStep);
    bo.stream = stream(60 + i++);
    fields.push_back(sample_field(sh_.init, fp.boundary, t, radii, bo));
  }
  double worst = 0.0;
  Detail d;
  for (const StefanResidualEntry& e : stefan_residual(fp.boundary, fields, kSlopeStep)) {
    worst = std::max(worst, e.relative);
    d.add("lambda_prime(t=" + fmt("%.3f", e.t) + ")", e.lambda_prime).add("half_jump_in_slope", 0.5 * (e.wx_minus - e.wx_plus));
  }
  r.pass = worst <= kStefanRelTol;
  r.detail = d.add("max_relative_residual", worst).add("limit", kStefanRelTol).str();
  return r;
}

CriterionResult Suite::c7() {
  CriterionResult r = criterion(7, "holder_regularity");
  const FixedPointResult& fp = solution();
  const HolderFit fit = holder_exponent(fp.boundary, 0.005, kHorizon);
  const std::vector<double> grid = uniform_grid(0.0, 1.0, 257);
  std::vector<double> v;
  for (double t : grid) v.push_back(1.0 - std::sqrt(t));
  const HolderFit sq = holder_exponent(Boundary::from_values(grid, v, 1.0), 0.0, 1.0);
  r.pass = fit.exponent >= kHolderMin && std::abs(sq.exponent - kSqrtTarget) <= kSqrtTol;
  r.detail = Detail().add("exponent", fit.exponent).add("fit_error", fit.fit_error).add("limit", kHolderMin)
                 .add("sqrt_fixture", sq.exponent).add("sqrt_limit", kSqrtTol).str();
  return r;
}

CriterionResult Suite::c8() {
  CriterionResult r = criterion(8, "monotonicity_preservation");
  const InitialData init = two_change();
  FixedPointOptions fo = sh_.options;
  fo.gamma.n_paths = n(kMonotonePaths);
  fo.gamma.stream = stream(80);
  const FixedPointResult fp = fixed_point_solve(init, sh_.grid, fo);
  const int initial = init.profile.monotonicity_changes(init.r0, init.lambda0minus);
  int worst = 0;
  BackwardOptions bo;
  bo.n_paths = n(kMonotoneFieldPaths);
  bo.max_step = sh_.grid[1];
  bo.workers = o_.workers;
  Detail d;
  d.add("initial_changes", initial);
  int i = 0;
  for (double t : {0.01, 0.02, 0.03, 0.04, 0.05}) {
    const double lt = fp.boundary.at(t);
    std::vector<double> radii;
    for (double x = init.r0 + kMonotoneSpacing; x < lt - 0.5 * kMonotoneSpacing; x += kMonotoneSpacing) radii.push_back(x);
    bo.stream = stream(81 + i++);
    const TemperatureField f = sample_field(init, fp.boundary, t, radii, bo);
    const int c = monotonicity_changes(f, default_hysteresis(f), init.r0, lt);
    worst = std::max(worst, c);
    d.add("changes(t=" + fmt("%.2f", t) + ")", c);
  }
  r.pass = fp.converged && initial == 2 && worst <= 2;
  r.detail = d.add("limit", 2).str();
  return r;
}

CriterionResult Suite::c9() {
  CriterionResult r = criterion(9, "one_phase_properties");
  const std::vector<double> grid = uniform_grid(0.0, kOnePhaseT, kOnePhaseNodes);
  const std::vector<PiecewiseProfile> fixtures{
      PiecewiseProfile::constant(0.0, 0.1, 0.5),
      PiecewiseProfile(std::vector<Segment>{{0.0, 0.08, SegmentKind::linear, 1.0, -1.0 / 0.08, 0.0}})};
  bool pass = true;
  Detail d;
  int i = 0;
  for (const PiecewiseProfile& f : fixtures) {
    OnePhaseOptions oo;
    oo.n_paths = n(kOnePhasePaths);
    oo.stream = stream(90 + i);
    oo.workers = o_.workers;
    const OnePhaseSolution sol = solve_one_phase(f, grid, oo);
    const OrderingReport sub = subadditivity_check(sol);
    const ScalingReport sc = scaling_minorization_check(sol, kOnePhaseQ, oo);
    pass = pass && sol.converged && sub.pass && sc.pass;
    const std::string tag = "f" + std::to_string(++i);
    d.add(tag + "_subadditive_margin", sub.worst_margin).add(tag + "_scaling_margin",
                                                             std::min(sc.direct.worst_margin, sc.companion.worst_margin));
  }
  r.pass = pass;
  r.detail = d.note("margins must be >= 0").str();
  return r;
}

CriterionResult Suite::c10() {
  CriterionResult r = criterion(10, "gamma_contraction");
  const std::vector<double> grid = uniform_grid(0.0, kContractionT, 11);
  std::vector<double> lower(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) lower[k] = 2.0 - grid[k];
  const Boundary a = Boundary::constant(grid, 2.0, 2.0);
  const Boundary b = Boundary::from_values(grid, lower, 2.0);
  GammaOptions go;
  go.n_paths = n(kContractionPaths);
  go.stream = stream(100);
  go.workers = o_.workers;
  go.max_step = grid[1];
  const GammaResult ga = evaluate_gamma(sh_.init, a, go);
  const GammaResult gb = evaluate_gamma(sh_.init, b, go);
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    num = std::max(num, std::abs(std::pow(ga.boundary.values[k], 3) - std::pow(gb.boundary.values[k], 3)));
    den = std::max(den, std::abs(std::pow(a.values[k], 3) - std::pow(b.values[k], 3)));
  }
  const double c = num / den;

  const FixedPointResult& from_top = solution();
  const PdeResult& fd = pde(true);
  std::vector<double> start;
  for (double t : sh_.grid) start.push_back(fd.boundary.at(t));
  FixedPointOptions fo = sh_.options;
  fo.initial_iterate = Boundary::from_values(sh_.grid, start, sh_.init.lambda0minus);
  const FixedPointResult from_fd = fixed_point_solve(sh_.init, sh_.grid, fo);
  const auto se = from_top.boundary_se();
  double worst = 0.0;
  for (std::size_t k = 0; k < sh_.grid.size(); ++k) {
    const double diff = std::abs(from_top.boundary.values[k] - from_fd.boundary.values[k]);
    if (diff > 0.0) worst = std::max(worst, diff / (3.0 * (se[k] + kTolFp)));
  }
  r.pass = c < 1.0 && worst <= 1.0 && from_fd.converged;
  r.detail = Detail().add("contraction_c", c).add("limit_c", 1.0).add("start_dependence_ratio", worst)
                 .add("limit", 1.0).add("iterations_from_fd", from_fd.iterations).str();
  return r;
}

CriterionResult Suite::c11() {
  CriterionResult r = criterion(11, "analytic_inequality_suite");
  InequalityOptions io;
  io.tail_paths = n(kTailPaths);
  io.stream = stream(110);
  io.workers = o_.workers;
  const DiagnosticsReport rep = inequality_suite(io);
  int failed = 0;
  std::string names;
  for (const Check& c : rep.checks)
    if (c.status == CheckStatus::fail) {
      ++failed;
      names += (names.empty() ? "" : " ") + c.name;
    }
  const ConeSweep cone = cone_volume_sweep(io.cone_alpha_points, io.cone_delta_points, io.cone_radius_points);
  r.pass = rep.all_pass();
  Detail d;
  d.add("checks", static_cast<double>(rep.checks.size())).add("failed", failed).add("cone_c_fit", cone.c_fit);
  if (failed) d.note("failing: " + names);
  r.detail = d.str();
  return r;
}

CriterionResult Suite::c12() {
  CriterionResult r = criterion(12, "determinism");
  const fs::path root = o_.scratch_dir.empty() ? fs::temp_directory_path() / "stefan_determinism" : fs::path(o_.scratch_dir);
  fs::remove_all(root);
  const nlohmann::json bump = initial_data_to_json(solid_bump());
  std::vector<RunConfig> configs;
  auto base = [&](Command cmd) {
    RunConfig c;
    c.command = cmd;
    c.initial_data = bump;
    c.horizon = 0.01;
    c.time_nodes = 11;
    c.field_nodes = 11;
    c.n_paths = static_cast<std::int64_t>(kDeterminismPaths);
    c.seed = o_.seed;
    c.dx = 5e-3;
    return c;
  };
  configs.push_back(base(Command::solve));
  configs.push_back(base(Command::field));
  configs.push_back(base(Command::pde));
  configs.push_back(base(Command::jump));
  RunConfig one = base(Command::onephase);
  one.initial_data = nullptr;
  one.density = profile_to_json(PiecewiseProfile::constant(0.0, 0.1, 0.5));
  configs.push_back(one);

  std::ostringstream sink;
  std::size_t files = 0, mismatches = 0;
  for (const RunConfig& base_cfg : configs) {
    const std::string name = command_name(*base_cfg.command);
    std::vector<fs::path> dirs;
    int i = 0;
    for (unsigned w : {1u, 8u, 1u}) {
      RunConfig c = base_cfg;
      c.workers = w;
      c.output_dir = (root / (name + "_" + std::to_string(i++))).string();
      run(c, sink);
      dirs.emplace_back(c.output_dir);
    }
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
      };
      const std::string ref = slurp(entry.path());
      ++files;
      for (std::size_t j = 1; j < dirs.size(); ++j)
        if (!fs::exists(dirs[j] / entry.path().filename()) || slurp(dirs[j] / entry.path().filename()) != ref)
          ++mismatches;
    }
  }
  r.pass = files > 0 && mismatches == 0;
  r.detail = Detail().add("commands", static_cast<double>(configs.size())).add("files", static_cast<double>(files))
                 .add("mismatches", static_cast<double>(mismatches)).note("workers 1, 8, 1").str();
  return r;
}

}  // namespace

std::string format_criterion(const CriterionResult& r) {
  char head[160];
  std::snprintf(head, sizeof head, "[%s] %2d %s (%.1f s): ", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds);
  return head + r.detail;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& o, std::ostream& log) {
  Suite suite(o, log);
  const std::vector<std::function<CriterionResult()>> all{
      [&] { return suite.c1(); },  [&] { return suite.c2(); },  [&] { return suite.c3(); },
      [&] { return suite.c4(); },  [&] { return suite.c5(); },  [&] { return suite.c6(); },
      [&] { return suite.c7(); },  [&] { return suite.c8(); },  [&] { return suite.c9(); },
      [&] { return suite.c10(); }, [&] { return suite.c11(); }, [&] { return suite.c12(); }};
  std::vector<CriterionResult> out;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!o.only.empty() && std::find(o.only.begin(), o.only.end(), id) == o.only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = all[i]();
    } catch (const std::exception& e) {
      r.id = id;
      r.name = "criterion_" + std::to_string(id);
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = seconds_since(t0);
    log << format_criterion(r) << std::endl;
    out.push_back(r);
  }
  return out;
}

}  // namespace stefan
