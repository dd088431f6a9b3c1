// nskv command-line driver.
//
//   nskv simulate        --config run.cfg --out out/
//   nskv expand          --preset tiny --out out/
//   nskv diagnose        --config run.cfg --snapshots out/ --out out/
//   nskv verify-scaling  --preset scaling
//   nskv bench

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "nskv/bilinear.hpp"
#include "nskv/config.hpp"
#include "nskv/csv.hpp"
#include "nskv/diagnostics.hpp"
#include "nskv/error.hpp"
#include "nskv/evolution.hpp"
#include "nskv/parallel.hpp"
#include "nskv/scaling.hpp"
#include "nskv/seed.hpp"
#include "nskv/series.hpp"
#include "nskv/snapshot.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace nskv;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Common {
  std::string config_path;
  std::string preset;
  std::string out_dir;
  int workers = 0;
  int snapshot_every = -1;
};

RunConfig load_config(const Common& c) {
  std::string text;
  if (!c.config_path.empty()) {
    std::ifstream in(c.config_path);
    if (!in) throw IoError("cannot open config '" + c.config_path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  if (!c.preset.empty()) {
    // A preset given on the command line counts as the first line; keys in
    // the file still override it.
    if (text.find("preset") != std::string::npos) {
      std::istringstream probe(text);
      std::string line;
      while (std::getline(probe, line)) {
        const auto k = line.find_first_not_of(" \t");
        if (k != std::string::npos && line.compare(k, 6, "preset") == 0)
          throw ConfigError("--preset given and the config file also sets preset");
      }
    }
    text = "preset = " + c.preset + "\n" + text;
  }
  if (text.empty()) throw ConfigError("no configuration: pass --config and/or --preset");
  RunConfig cfg = parse_config(text);
  if (!c.out_dir.empty()) cfg.out_dir = c.out_dir;
  if (c.snapshot_every >= 0) cfg.snapshot_every = c.snapshot_every;
  return cfg;
}

void prepare_out(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
}

json lattice_json(const KLattice& lat) {
  return {{"step", lat.step()},
          {"half_extents", {lat.half_extent(0), lat.half_extent(1), lat.half_extent(2)}},
          {"nodes", lat.node_count()}};
}

json config_json(const RunConfig& cfg) {
  json j;
  j["echo"] = cfg.echo;
  j["preset"] = cfg.preset;
  j["seed"] = to_string(cfg.seed);
  j["a"] = cfg.flow.a;
  j["b"] = cfg.flow.b;
  j["eps"] = cfg.flow.eps;
  if (cfg.flow.amplitude) j["amplitude"] = *cfg.flow.amplitude;
  if (cfg.flow.target_energy) j["energy"] = *cfg.flow.target_energy;
  j["integrator"] = to_string(cfg.integrator);
  j["tau"] = cfg.tau;
  j["horizon_tau"] = cfg.horizon_tau;
  j["record_every_tau"] = cfg.record_every_tau;
  j["steps_per_horizon"] = cfg.steps_per_horizon;
  j["shell_fraction"] = cfg.shell_fraction;
  j["guard_threshold"] = cfg.guard_threshold;
  j["stop_on_guard"] = cfg.stop_on_guard;
  return j;
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::string snapshot_name(std::size_t record) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snap_%06zu.nskv", record);
  return buf;
}

Calibrated make_seed(const RunConfig& cfg) {
  if (cfg.seed == SeedKind::zero) return {VecField(cfg.flow.lattice()), 0.0};
  return build_seed(cfg.seed, cfg.flow);
}

SimulationSettings settings_from(const RunConfig& cfg) {
  SimulationSettings s;
  s.tau = cfg.tau;
  s.horizon = cfg.horizon_tau * cfg.tau;
  s.record_interval = cfg.record_every_tau * cfg.tau;
  s.shell_fraction = cfg.shell_fraction;
  s.guard_threshold = cfg.guard_threshold;
  s.stop_on_guard = cfg.stop_on_guard;
  s.max_correction = cfg.max_correction;
  s.steps_per_horizon = cfg.steps_per_horizon;
  return s;
}

// Picard variant of the run loop: one mild-form solve per record interval.
SimulationResult run_picard(const VecField& seed, const RunConfig& cfg,
                            const std::function<void(const RunEvent&)>& on_record) {
  const SimulationSettings s = settings_from(cfg);
  SimulationResult res;
  ConvPlan plan(seed.lattice());
  std::optional<XGrid> grid;
  if (seed.antisymmetric()) grid = default_xgrid(seed.lattice(), cfg.flow.a, s.grid);
  auto row_of = [&](double t, const VecField& v) {
    DiagRow r;
    r.t = t;
    r.energy = parseval_energy(v);
    r.enstrophy = parseval_enstrophy(v);
    r.boundary_frac = boundary_guard(v, s.shell_fraction);
    if (grid) {
      r.max_speed = max_speed(v, *grid).value;
      r.align_cos = alignment_cosine(v, *grid);
    }
    return r;
  };
  VecField v = seed;
  std::size_t record = 0;
  res.series.push(row_of(0.0, v));
  if (on_record) on_record(RunEvent{record++, &res.series.rows.back(), &v});
  const int n = static_cast<int>(std::llround(cfg.horizon_tau / cfg.record_every_tau));
  for (int i = 1; i <= n; ++i) {
    const double t = std::min(i * s.record_interval, s.horizon);
    const double dt = t - res.final_time;
    v = picard_solve(v, dt, cfg.picard_steps, cfg.picard_tol, plan).v;
    res.steps += cfg.picard_steps;
    res.final_time = t;
    res.series.push(row_of(t, v));
    if (on_record) on_record(RunEvent{record++, &res.series.rows.back(), &v});
    if (res.series.rows.back().boundary_frac > s.guard_threshold && !res.untrusted_after) {
      res.untrusted_after = t;
      res.status = RunStatus::untrusted;
      res.message = "boundary guard exceeded";
      if (s.stop_on_guard) break;
    }
  }
  res.final_field = std::move(v);
  return res;
}

json peak_json(const DiagSeries& series, double tau, double DiagRow::*field) {
  std::vector<double> t, y;
  for (const auto& r : series.rows) {
    t.push_back(r.t / tau);
    y.push_back(r.*field);
  }
  if (t.size() < 3) return nullptr;
  const Peak p = detect_peak_time(t, y);
  return {{"t_tau", p.t}, {"value", p.value}, {"interior", p.interior}};
}

// ---------------------------------------------------------------------------

int cmd_simulate(const Common& common) {
  const RunConfig cfg = load_config(common);
  prepare_out(cfg.out_dir);
  const Calibrated seed = make_seed(cfg);
  const SimulationSettings settings = settings_from(cfg);
  const KLattice lat = seed.field.lattice();

  std::optional<XGrid> grid;
  if (seed.field.antisymmetric()) grid = default_xgrid(lat, cfg.flow.a, settings.grid);

  MarginalSeries mk{"k3", {}, {}, {}, {}};
  for (int i = 0; i < lat.extent(2); ++i) mk.coords.push_back(lat.coords(lat.index({0, 0, i}))[2] * lat.step());
  MarginalSeries mx{"x3", {}, {}, {}, {}};
  if (grid)
    for (int i = 0; i < grid->points[2]; ++i) mx.coords.push_back(grid->coordinate(2, i));

  const std::uint8_t tag = seed_tag(cfg.seed);
  std::vector<std::string> snapshots;
  auto on_record = [&](const RunEvent& e) {
    mk.times.push_back(e.row->t);
    mk.rows.push_back(marginal_enstrophy_k3(*e.field));
    if (grid) {
      X3Marginal m = marginal_enstrophy_x3(*e.field, *grid);
      mx.times.push_back(e.row->t);
      mx.rows.push_back(std::move(m.density));
      mx.decay_warning.push_back(m.decay_warning);
    }
    if (cfg.snapshot_every > 0 && e.record % static_cast<std::size_t>(cfg.snapshot_every) == 0) {
      const std::string name = snapshot_name(e.record);
      write_snapshot((fs::path(cfg.out_dir) / name).string(), *e.field, e.row->t, tag);
      snapshots.push_back(name);
    }
    std::fprintf(stderr, "t = %.6g tau  E = %.6e  S = %.6e  guard = %.3e\n", e.row->t / cfg.tau, e.row->energy,
                 e.row->enstrophy, e.row->boundary_frac);
  };

  const auto t0 = std::chrono::steady_clock::now();
  SimulationResult res = cfg.integrator == Integrator::picard ? run_picard(seed.field, cfg, on_record)
                                                              : run_simulation(seed.field, settings, on_record);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const fs::path out(cfg.out_dir);
  write_diagnostics_csv((out / "diagnostics.csv").string(), res.series, cfg.tau);
  write_marginal_csv((out / "marginal_k3.csv").string(), mk, cfg.tau);
  if (grid) write_marginal_csv((out / "marginal_x3.csv").string(), mx, cfg.tau);
  write_snapshot((out / "final.nskv").string(), res.final_field, res.final_time, tag);

  json meta;
  meta["command"] = "simulate";
  meta["version"] = kVersion;
  meta["config"] = config_json(cfg);
  meta["amplitude_used"] = seed.amplitude;
  meta["lattice"] = lattice_json(lat);
  meta["workers"] = worker_count();
  meta["status"] = to_string(res.status);
  meta["message"] = res.message;
  meta["guard"] = {{"shell_fraction", cfg.shell_fraction},
                   {"threshold", cfg.guard_threshold},
                   {"tripped", res.untrusted_after.has_value()},
                   {"untrusted_after_tau", res.untrusted_after ? json(*res.untrusted_after / cfg.tau) : json(nullptr)}};
  meta["final_time_tau"] = res.final_time / cfg.tau;
  meta["steps"] = res.steps;
  meta["rejected_steps"] = res.rejected;
  meta["records"] = res.series.rows.size();
  meta["snapshots"] = snapshots;
  meta["enstrophy_peak"] = peak_json(res.series, cfg.tau, &DiagRow::enstrophy);
  meta["max_speed_peak"] = peak_json(res.series, cfg.tau, &DiagRow::max_speed);
  if (grid) {
    meta["xgrid"] = {{"lo", {grid->lo[0], grid->lo[1], grid->lo[2]}},
                     {"hi", {grid->hi[0], grid->hi[1], grid->hi[2]}},
                     {"points", grid->points}};
    meta["x3_decay_warning"] = std::any_of(mx.decay_warning.begin(), mx.decay_warning.end(), [](bool b) { return b; });
  }
  meta["wall_seconds"] = wall;
  write_json((out / "metadata.json").string(), meta);
  std::printf("status: %s (%zu records, %ld steps, %ld rejected)\n", to_string(res.status).c_str(),
              res.series.rows.size(), res.steps, res.rejected);
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_expand(const Common& common, bool bracket) {
  const RunConfig cfg = load_config(common);
  if (cfg.seed == SeedKind::zero) throw ConfigError("expand needs a non-zero seed");
  prepare_out(cfg.out_dir);
  const fs::path out(cfg.out_dir);

  // The table is built for the unit-amplitude profile; the amplitude enters
  // only through the partial sums.
  FlowConfig unit = cfg.flow;
  unit.amplitude = 1.0;
  unit.target_energy.reset();
  const VecField seed = cfg.seed == SeedKind::complex_lobe ? build_complex_seed(unit) : build_antisym_seed(unit);

  const double smax_tau = cfg.series_smax_tau > 0.0 ? cfg.series_smax_tau : cfg.horizon_tau;
  const TimeGrid tg{smax_tau * cfg.tau, cfg.series_points};
  const auto budget = static_cast<std::size_t>(cfg.memory_budget_mb * 1024.0 * 1024.0);
  const GpTable table = compute_gp_table(seed, cfg.series_order, tg, budget);
  const int P = table.max_order();
  const int last = tg.points - 1;

  // Table export: every term at the final time, plus the norm index.
  const fs::path gp_dir = out / "gp";
  prepare_out(gp_dir.string());
  const std::uint8_t tag = seed_tag(cfg.seed);
  std::vector<std::vector<double>> index_rows;
  for (int p = 1; p <= P; ++p) {
    char name[48];
    std::snprintf(name, sizeof name, "g_%02d.nskv", p);
    write_snapshot((gp_dir / name).string(), table.term(p, last), tg.at(last), tag);
    std::snprintf(name, sizeof name, "c_%02d.nskv", p);
    write_snapshot((gp_dir / name).string(), table.coefficient(p, last), tg.at(last), tag);
    for (int i = 0; i < tg.points; ++i) {
      const VecField& g = table.term(p, i);
      const VecField& c = table.coefficient(p, i);
      index_rows.push_back({double(p), double(i), tg.at(i) / cfg.tau, g.sup_norm(), g.values().norm(),
                            c.sup_norm(), c.values().norm()});
    }
  }
  write_table_csv((out / "gp_index.csv").string(),
                  {"p", "i", "s_tau", "g_sup", "g_l2", "c_sup", "c_l2"}, index_rows);

  // Fixed-point report at the final time.
  const Vec3 k0(0.0, 0.0, cfg.flow.a);
  std::vector<std::vector<double>> fix_rows;
  json fix = json::array();
  for (int p = 2; p <= P; ++p) {
    try {
      const RescaledProfile prof = rescale_gp(table, p, last, k0);
      const FixedPointFit fit = fit_fixed_point(prof);
      fix_rows.push_back({double(p), fit.c_hat, fit.axial_residual});
      fix.push_back({{"p", p}, {"c_hat", fit.c_hat}, {"axial_residual", fit.axial_residual}});
    } catch (const DomainError& e) {
      fix.push_back({{"p", p}, {"skipped", e.what()}});
    }
  }
  write_table_csv((out / "fixpoint.csv").string(), {"p", "c_hat", "axial_residual"}, fix_rows);

  // Lambda estimates over the time grid.
  std::vector<std::string> head{"s_tau"};
  for (int p = 1; p < P; ++p) head.push_back("lambda_" + std::to_string(p));
  head.push_back("lambda_working");
  std::vector<std::vector<double>> lam_rows;
  std::vector<double> working;
  for (int i = 1; i < tg.points; ++i) {
    const LambdaEstimate est = estimate_lambda(table, i, LambdaNorm::sup);
    std::vector<double> row{tg.at(i) / cfg.tau};
    for (const auto& r : est.ratios) row.push_back(r ? *r : std::nan(""));
    row.push_back(est.working ? *est.working : std::nan(""));
    working.push_back(row.back());
    lam_rows.push_back(std::move(row));
  }
  write_table_csv((out / "lambda.csv").string(), head, lam_rows);
  bool monotone = true;
  for (std::size_t i = 1; i < working.size(); ++i)
    if (!(working[i] >= working[i - 1])) monotone = false;

  json rep;
  rep["command"] = "expand";
  rep["version"] = kVersion;
  rep["config"] = config_json(cfg);
  rep["lattice"] = lattice_json(seed.lattice());
  rep["order"] = P;
  rep["time_points"] = tg.points;
  rep["s_max_tau"] = smax_tau;
  rep["fixpoint"] = fix;
  const LambdaEstimate final_lambda = estimate_lambda(table, last, LambdaNorm::sup);
  const LambdaEstimate final_l2 = estimate_lambda(table, last, LambdaNorm::l2);
  rep["lambda_working"] = final_lambda.working ? json(*final_lambda.working) : json(nullptr);
  rep["lambda_working_l2"] = final_l2.working ? json(*final_l2.working) : json(nullptr);
  rep["lambda_nondecreasing_in_s"] = monotone;

  // Series against the time-stepper at the configured amplitude.
  const double A = cfg.series_amplitude;
  {
    const VecField sum = series_partial_sum(table, A, tg.s_max, P);
    VecField v0 = seed;
    v0 *= A;
    ConvPlan plan(seed.lattice());
    const VecField ref = picard_solve(v0, tg.s_max, tg.points - 1, cfg.picard_tol, plan).v;
    const double norm = ref.values().norm();
    rep["series_check"] = {{"amplitude", A},
                           {"relative_deviation", norm > 0 ? (sum.values() - ref.values()).norm() / norm : 0.0},
                           {"reference", "picard on the same time grid"}};
  }

  if (final_lambda.working) {
    const double ac = 1.0 / *final_lambda.working;
    rep["critical_amplitude_from_lambda"] = ac;
    if (bracket) {
      SimulationSettings s;
      s.tau = cfg.tau;
      s.horizon = tg.s_max;
      s.record_interval = tg.s_max / 16.0;
      s.physical = false;
      s.stop_on_guard = false;
      s.steps_per_horizon = cfg.steps_per_horizon;
      auto blows = [&](double amp) {
        VecField v = seed;
        v *= amp;
        const SimulationResult r = run_simulation(v, s);
        std::fprintf(stderr, "A = %.6g: %s\n", amp, to_string(r.status).c_str());
        return r.status == RunStatus::blowup_suspected;
      };
      const BisectionBracket br = bracket_critical_amplitude(blows, ac, 6);
      rep["bracket"] = {{"lo", br.lo}, {"hi", br.hi}, {"runs", br.runs}, {"found", br.found}};
    }
  }
  write_json((out / "expand_report.json").string(), rep);
  std::printf("%s\n", rep.dump(2).c_str());
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_diagnose(const Common& common, const std::string& snap_dir) {
  const RunConfig cfg = load_config(common);
  const fs::path in_dir(snap_dir.empty() ? cfg.out_dir : snap_dir);
  std::vector<fs::path> files;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(in_dir, ec))
    if (e.is_regular_file() && e.path().filename().string().rfind("snap_", 0) == 0 && e.path().extension() == ".nskv")
      files.push_back(e.path());
  if (ec) throw IoError("cannot list '" + in_dir.string() + "': " + ec.message());
  if (files.empty()) throw IoError("no snap_*.nskv files in '" + in_dir.string() + "'");
  std::sort(files.begin(), files.end());
  prepare_out(cfg.out_dir);

  SimulationSettings s = settings_from(cfg);
  DiagSeries series;
  MarginalSeries mk{"k3", {}, {}, {}, {}};
  MarginalSeries mx{"x3", {}, {}, {}, {}};
  std::optional<XGrid> grid;
  for (const auto& f : files) {
    const Snapshot snap = read_snapshot(f.string());
    const VecField& v = snap.field;
    const KLattice& lat = v.lattice();
    if (mk.coords.empty())
      for (int i = 0; i < lat.extent(2); ++i) mk.coords.push_back(lat.coords(lat.index({0, 0, i}))[2] * lat.step());
    if (!grid && v.antisymmetric()) {
      grid = default_xgrid(lat, cfg.flow.a, s.grid);
      for (int i = 0; i < grid->points[2]; ++i) mx.coords.push_back(grid->coordinate(2, i));
    }
    DiagRow r;
    r.t = snap.time;
    r.energy = parseval_energy(v);
    r.enstrophy = parseval_enstrophy(v);
    r.boundary_frac = boundary_guard(v, s.shell_fraction);
    if (grid && v.antisymmetric()) {
      r.max_speed = max_speed(v, *grid).value;
      r.align_cos = alignment_cosine(v, *grid);
      X3Marginal m = marginal_enstrophy_x3(v, *grid);
      mx.times.push_back(snap.time);
      mx.rows.push_back(std::move(m.density));
    }
    series.push(r);
    mk.times.push_back(snap.time);
    mk.rows.push_back(marginal_enstrophy_k3(v));
  }
  const fs::path out(cfg.out_dir);
  write_diagnostics_csv((out / "diagnostics_recomputed.csv").string(), series, cfg.tau);
  write_marginal_csv((out / "marginal_k3_recomputed.csv").string(), mk, cfg.tau);
  if (grid) write_marginal_csv((out / "marginal_x3_recomputed.csv").string(), mx, cfg.tau);
  std::printf("diagnosed %zu snapshots\n", files.size());
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_verify_scaling(const Common& common) {
  const RunConfig cfg = load_config(common);
  if (cfg.seed == SeedKind::zero) throw ConfigError("verify-scaling needs a non-zero seed");
  prepare_out(cfg.out_dir);
  FlowConfig flow = cfg.flow;
  if (flow.target_energy) {
    flow.amplitude = build_seed(cfg.seed, flow).amplitude;
    flow.target_energy.reset();
  }
  const ScalingReport rep = verify_scaling(cfg.seed, flow, cfg.scaling_lambda, cfg.horizon_tau * cfg.tau,
                                           cfg.scaling_steps, cfg.scaling_levels, cfg.scaling_tolerance);
  std::vector<std::vector<double>> rows;
  json levels = json::array();
  std::printf("%-8s %-16s %-14s %-14s\n", "step", "fine lattice", "error", "nonlinear");
  for (const auto& l : rep.levels) {
    rows.push_back({l.step, double(l.fine_half[0]), double(l.fine_half[1]), double(l.fine_half[2]), l.error,
                    l.nonlinear_share});
    levels.push_back({{"step", l.step},
                      {"fine_half", l.fine_half},
                      {"coarse_half", l.coarse_half},
                      {"relative_error", l.error},
                      {"nonlinear_share", l.nonlinear_share}});
    char lat[32];
    std::snprintf(lat, sizeof lat, "%dx%dx%d", l.fine_half[0], l.fine_half[1], l.fine_half[2]);
    std::printf("%-8g %-16s %-14.4e %-14.4e\n", l.step, lat, l.error, l.nonlinear_share);
  }
  const fs::path out(cfg.out_dir);
  write_table_csv((out / "scaling.csv").string(), {"step", "n1", "n2", "n3", "relative_error", "nonlinear_share"},
                  rows);
  json j;
  j["command"] = "verify-scaling";
  j["version"] = kVersion;
  j["config"] = config_json(cfg);
  j["lambda"] = rep.lambda;
  j["horizon_tau"] = cfg.horizon_tau;
  j["steps"] = rep.steps;
  j["levels"] = levels;
  j["error_decreases_under_refinement"] = rep.decreasing;
  j["tolerance"] = rep.tolerance;
  j["within_tolerance"] = rep.within_tolerance;
  write_json((out / "scaling.json").string(), j);
  std::printf("decreasing under refinement: %s; final error %s tolerance %.1e\n", rep.decreasing ? "yes" : "no",
              rep.within_tolerance ? "within" : "OUTSIDE", rep.tolerance);
  return 0;
}

// ---------------------------------------------------------------------------

Index3 parse_size(const std::string& s) {
  Index3 h{};
  char x1 = 0, x2 = 0;
  std::istringstream in(s);
  if (!(in >> h[0] >> x1 >> h[1] >> x2 >> h[2]) || x1 != 'x' || x2 != 'x' || !in.eof())
    throw ConfigError("bad lattice size '" + s + "' (expected N1xN2xN3 half-extents)");
  return h;
}

int cmd_bench(const Common& common, const std::vector<std::string>& sizes, int repeat, bool skip_direct) {
  const std::string out_dir = common.out_dir.empty() ? "out" : common.out_dir;
  prepare_out(out_dir);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  std::vector<std::vector<double>> rows;
  std::printf("%-14s %-10s %-12s %-12s %-10s %-10s\n", "lattice", "nodes", "fast_s", "direct_s", "speedup",
              "rel_dev");
  for (const auto& s : sizes) {
    const Index3 h = parse_size(s);
    const KLattice lat(1.0, h);
    VecField v(lat), w(lat);
    for (std::size_t n = 0; n < lat.node_count(); ++n) {
      v[n] = Vec3(nd(rng), nd(rng), nd(rng));
      w[n] = Vec3(nd(rng), nd(rng), nd(rng));
    }
    ConvPlan plan(lat);
    VecField fast = plan.apply(v, w);  // warm-up
    double best_fast = 1e300;
    for (int r = 0; r < repeat; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      fast = plan.apply(v, w);
      best_fast = std::min(best_fast, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    double direct_s = std::nan(""), dev = std::nan("");
    if (!skip_direct) {
      const auto t0 = std::chrono::steady_clock::now();
      const VecField d = bilinear_direct(v, w);
      direct_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      dev = (fast.values() - d.values()).norm() / d.values().norm();
    }
    const std::string name = std::to_string(lat.extent(0)) + "x" + std::to_string(lat.extent(1)) + "x" +
                             std::to_string(lat.extent(2));
    std::printf("%-14s %-10zu %-12.4e %-12.4e %-10.1f %-10.2e\n", name.c_str(), lat.node_count(), best_fast,
                direct_s, direct_s / best_fast, dev);
    std::fflush(stdout);
    rows.push_back({double(lat.extent(0)), double(lat.extent(1)), double(lat.extent(2)), double(lat.node_count()),
                    best_fast, direct_s, direct_s / best_fast, dev});
  }
  write_table_csv((fs::path(out_dir) / "bench.csv").string(),
                  {"e1", "e2", "e3", "nodes", "fast_seconds", "direct_seconds", "speedup", "relative_deviation"},
                  rows);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral Navier-Stokes solver on a truncated k-lattice"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--config", common.config_path, "Configuration file (key = value)");
  app.add_option("--preset", common.preset, "Named preset: desk, paper2, tiny, scaling");
  app.add_option("--out", common.out_dir, "Output directory (overrides the config)");
  app.add_option("--workers", common.workers, "Worker threads (default: NSKV_WORKERS or 1)")->check(CLI::Range(1, 1024));
  app.add_option("--snapshot-every", common.snapshot_every, "Records between snapshots, 0 = none")
      ->check(CLI::NonNegativeNumber);
  app.set_version_flag("--version", kVersion);

  auto* sim = app.add_subcommand("simulate", "March the configured seed and write diagnostics");
  auto* exp = app.add_subcommand("expand", "Series coefficients, fixed-point and growth-factor reports");
  bool bracket = false;
  exp->add_flag("--bracket", bracket, "Also bisect the critical amplitude with evolution runs");
  auto* diag = app.add_subcommand("diagnose", "Recompute observables from snapshots");
  std::string snap_dir;
  diag->add_option("--snapshots", snap_dir, "Directory holding snap_*.nskv (default: output directory)");
  auto* scal = app.add_subcommand("verify-scaling", "Nested-lattice scaling experiment");
  auto* bench = app.add_subcommand("bench", "Direct vs FFT convolution timing");
  std::vector<std::string> sizes{"4x4x8", "8x8x32", "16x16x64", "16x16x128"};
  int repeat = 3;
  bool skip_direct = false;
  bench->add_option("--sizes", sizes, "Half-extents N1xN2xN3 (repeatable)");
  bench->add_option("--repeat", repeat, "Timed repetitions of the fast path")->check(CLI::PositiveNumber);
  bench->add_flag("--fast-only", skip_direct, "Skip the direct summation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (common.workers > 0) set_worker_count(common.workers);
    if (sim->parsed()) return cmd_simulate(common);
    if (exp->parsed()) return cmd_expand(common, bracket);
    if (diag->parsed()) return cmd_diagnose(common, snap_dir);
    if (scal->parsed()) return cmd_verify_scaling(common);
    if (bench->parsed()) return cmd_bench(common, sizes, repeat, skip_direct);
  } catch (const Error& e) {
    std::fprintf(stderr, "error kind=%s: %s\n", e.kind().c_str(), e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error kind=internal: %s\n", e.what());
    return 1;
  }
  return 0;
}
