#include "nskv/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nskv/error.hpp"
#include "nskv/parallel.hpp"

namespace nskv {

VecField heat_step(const VecField& v, double h) {
  if (h < 0.0) throw DomainError("heat step needs h >= 0");
  if (h == 0.0) return v;
  const KLattice& lat = v.lattice();
  VecField out = v;
  for (std::size_t n = 0; n < lat.node_count(); ++n)
    out[n] *= std::exp(-lat.wavevector(n).squaredNorm() * h);
  return out;
}

double phi1(double z) {
  if (std::abs(z) < 1e-3) return 1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0));
  return std::expm1(z) / z;
}

double phi2(double z) {
  if (std::abs(z) < 1e-3) return 0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z / 120.0));
  return (std::expm1(z) - z) / (z * z);
}

namespace {

struct EtdCoefficients {
  double h = -1.0;
  std::vector<double> decay, p1, p2;

  void update(const KLattice& lat, double step) {
    if (step == h && decay.size() == lat.node_count()) return;
    h = step;
    const std::size_t n = lat.node_count();
    decay.resize(n);
    p1.resize(n);
    p2.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double z = -lat.wavevector(i).squaredNorm() * step;
      decay[i] = std::exp(z);
      p1[i] = step * phi1(z);
      p2[i] = step * phi2(z);
    }
  }
};

thread_local EtdCoefficients tl_coeff;

}  // namespace

StepResult etd_rk2_step(const StepperState& state, ConvPlan& plan) {
  if (!(state.h > 0.0)) throw DomainError("ETD-RK2 step needs h > 0");
  const VecField& v = state.v;
  const KLattice& lat = v.lattice();
  EtdCoefficients& c = tl_coeff;
  c.update(lat, state.h);
  const bool odd = v.antisymmetric();

  const VecField n0 = plan.apply(v, v);
  VecField a(lat, Eigen::Matrix3Xd(3, v.values().cols()), v.flags());
  for (std::size_t i = 0; i < lat.node_count(); ++i) a[i] = c.decay[i] * v[i] + c.p1[i] * n0[i];
  if (odd) a = antisymmetrize(a);

  const VecField n1 = plan.apply(a, a);
  StepResult r;
  r.state.t = state.t + state.h;
  r.state.h = state.h;
  VecField next = a;
  double corr = 0.0;
  for (std::size_t i = 0; i < lat.node_count(); ++i) {
    const Vec3 d = c.p2[i] * (n1[i] - n0[i]);
    next[i] += d;
    corr = std::max(corr, d.norm());
  }
  if (odd) next = antisymmetrize(next);
  next.flags() = v.flags();
  r.state.stats.sup_norm = next.sup_norm();
  r.state.stats.correction = r.state.stats.sup_norm > 0.0 ? corr / r.state.stats.sup_norm : 0.0;
  if (!next.all_finite() || !std::isfinite(r.state.stats.correction)) r.status = StepStatus::blowup_suspected;
  r.state.v = std::move(next);
  return r;
}

VecField etd_rk2_march(const VecField& v0, double T, int n_steps, ConvPlan& plan) {
  if (n_steps < 1) throw DomainError("march needs at least one step");
  StepperState s{0.0, v0, T / n_steps, {}};
  for (int i = 0; i < n_steps; ++i) {
    StepResult r = etd_rk2_step(s, plan);
    if (r.status != StepStatus::ok) throw NoConvergenceError("non-finite values during ETD-RK2 march");
    s = std::move(r.state);
  }
  return s.v;
}

PicardResult picard_solve(const VecField& v0, double T, int n_steps, double tol, ConvPlan& plan,
                          int max_iterations) {
  if (!(T > 0.0) || n_steps < 1) throw DomainError("Picard solve needs T > 0 and n_steps >= 1");
  const KLattice& lat = v0.lattice();
  const double dt = T / n_steps;
  const std::size_t nodes = lat.node_count();
  std::vector<double> decay(nodes);
  for (std::size_t i = 0; i < nodes; ++i) decay[i] = std::exp(-lat.wavevector(i).squaredNorm() * dt);

  std::vector<VecField> linear(static_cast<std::size_t>(n_steps) + 1);
  linear[0] = v0;
  for (int i = 1; i <= n_steps; ++i) linear[static_cast<std::size_t>(i)] = heat_step(v0, i * dt);

  std::vector<VecField> iterate = linear;
  std::vector<VecField> forcing(iterate.size());
  double prev_change = std::numeric_limits<double>::infinity();
  int growth_streak = 0;
  for (int it = 1; it <= max_iterations; ++it) {
    for (std::size_t i = 0; i < iterate.size(); ++i) forcing[i] = plan.apply(iterate[i], iterate[i]);
    VecField integral(lat);
    double change = 0.0;
    for (std::size_t i = 0; i < iterate.size(); ++i) {
      if (i > 0) {
        for (std::size_t n = 0; n < nodes; ++n)
          integral[n] = decay[n] * (integral[n] + 0.5 * dt * forcing[i - 1][n]) + 0.5 * dt * forcing[i][n];
      }
      VecField next = linear[i] + integral;
      next.flags() = v0.flags();
      if (v0.antisymmetric()) next = antisymmetrize(next);
      if (!next.all_finite()) throw NoConvergenceError("Picard iterate is not finite; reduce T");
      change = std::max(change, (next.values() - iterate[i].values()).colwise().norm().maxCoeff());
      iterate[i] = std::move(next);
    }
    if (change <= tol) return {iterate.back(), it, change};
    growth_streak = change > prev_change ? growth_streak + 1 : 0;
    if (growth_streak >= 3)
      throw NoConvergenceError("Picard iteration is not contracting; use a smaller horizon T");
    prev_change = change;
  }
  throw NoConvergenceError("Picard iteration did not reach the tolerance; use a smaller horizon T");
}

double boundary_guard(const VecField& v, double shell_fraction) {
  if (!(shell_fraction > 0.0 && shell_fraction < 1.0)) throw DomainError("shell fraction must be in (0, 1)");
  const KLattice& lat = v.lattice();
  const double c1 = (1.0 - shell_fraction) * lat.half_extent(0) * lat.step();
  const double c2 = (1.0 - shell_fraction) * lat.half_extent(1) * lat.step();
  double total = 0.0, shell = 0.0;
  for (std::size_t n = 0; n < lat.node_count(); ++n) {
    const Vec3 k = lat.wavevector(n);
    const double s = k.squaredNorm() * v[n].squaredNorm();
    total += s;
    if (std::abs(k.x()) > c1 || std::abs(k.y()) > c2) shell += s;
  }
  return total > 0.0 ? shell / total : 0.0;
}

void DiagSeries::push(const DiagRow& r) {
  if (!rows.empty() && !(r.t > rows.back().t)) throw DomainError("diagnostic times must increase");
  rows.push_back(r);
}

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::completed: return "completed";
    case RunStatus::blowup_suspected: return "blowup-suspected";
    case RunStatus::untrusted: return "untrusted";
  }
  return "unknown";
}

double default_step(const VecField& v, double horizon, int steps_per_horizon) {
  double h = horizon / steps_per_horizon;
  const SupportRadius r = support_radius(v, 1e-6);
  const double k2 = 2.0 * r.perpendicular * r.perpendicular + r.axial * r.axial;
  if (k2 > 0.0) h = std::min(h, 0.25 / k2);
  return h;
}

namespace {

double safe_enstrophy(const VecField& v) {
  if (!v.all_finite()) return std::numeric_limits<double>::infinity();
  return parseval_enstrophy(v);
}

DiagRow make_row(double t, const VecField& v, const SimulationSettings& s, const XGrid* grid) {
  DiagRow r;
  r.t = t;
  r.energy = parseval_energy(v);
  r.enstrophy = safe_enstrophy(v);
  r.boundary_frac = boundary_guard(v, s.shell_fraction);
  if (grid && v.antisymmetric() && v.all_finite()) {
    r.max_speed = max_speed(v, *grid).value;
    r.align_cos = alignment_cosine(v, *grid);
  }
  return r;
}

bool row_finite(const DiagRow& r) {
  return std::isfinite(r.energy) && std::isfinite(r.enstrophy) && std::isfinite(r.max_speed) &&
         std::isfinite(r.align_cos) && std::isfinite(r.boundary_frac);
}

// Dominant axial wavenumber: k3 of the largest node in the upper half.
double dominant_axial(const VecField& v) {
  const KLattice& lat = v.lattice();
  double best = 0.0, k3 = 0.0;
  for (std::size_t n = 0; n < lat.node_count(); ++n) {
    const Vec3 k = lat.wavevector(n);
    if (k.z() <= 0.0) continue;
    const double s = v[n].squaredNorm();
    if (s > best) {
      best = s;
      k3 = k.z();
    }
  }
  return k3 > 0.0 ? k3 : lat.step();
}

}  // namespace

SimulationResult run_simulation(const VecField& seed, const SimulationSettings& settings,
                                const std::function<void(const RunEvent&)>& on_record) {
  if (!(settings.horizon > 0.0)) throw ConfigError("horizon must be positive");
  if (!(settings.record_interval > 0.0)) throw ConfigError("record interval must be positive");
  SimulationResult res;
  const KLattice& lat = seed.lattice();
  ConvPlan plan(lat);

  std::optional<XGrid> grid;
  if (settings.physical && seed.antisymmetric())
    grid = default_xgrid(lat, dominant_axial(seed), settings.grid);
  const XGrid* gp = grid ? &*grid : nullptr;

  StepperState state{0.0, seed, 0.0, {}};
  const double s0 = safe_enstrophy(seed);
  const double h_min = settings.h_min_tau * settings.tau;
  const double h_cap = settings.horizon / settings.steps_per_horizon;

  std::size_t record = 0;
  auto emit = [&](const DiagRow& row) {
    res.series.push(row);
    if (on_record) on_record(RunEvent{record, &res.series.rows.back(), &state.v});
    ++record;
  };
  emit(make_row(0.0, seed, settings, gp));

  double h_cur = settings.fixed_step ? *settings.fixed_step : default_step(seed, settings.horizon, settings.steps_per_horizon);
  long record_index = 1;
  double next_record = settings.record_interval;
  long accepted_since_eval = 0;
  const double t_eps = 1e-12 * settings.horizon;

  while (state.t < settings.horizon - t_eps) {
    if (!settings.fixed_step && accepted_since_eval >= settings.reevaluate_every) {
      const double nominal = std::min(default_step(state.v, settings.horizon, settings.steps_per_horizon), h_cap);
      h_cur = std::min(nominal, 2.0 * h_cur);
      accepted_since_eval = 0;
    }
    const bool last_record = next_record >= settings.horizon - t_eps;
    const double target = last_record ? settings.horizon : next_record;
    const bool lands = h_cur >= target - state.t - t_eps;
    state.h = lands ? target - state.t : h_cur;
    StepResult r = etd_rk2_step(state, plan);
    const bool bad = r.status != StepStatus::ok ||
                     (!settings.fixed_step && r.state.stats.correction > settings.max_correction);
    if (bad) {
      ++res.rejected;
      if (settings.fixed_step && r.status != StepStatus::ok) {
        res.status = RunStatus::blowup_suspected;
        res.message = "non-finite values at fixed step";
        break;
      }
      h_cur = 0.5 * state.h;
      if (h_cur < h_min) {
        res.status = RunStatus::blowup_suspected;
        res.message = "step-halving cascade below h_min";
        break;
      }
      continue;
    }
    ++res.steps;
    ++accepted_since_eval;
    if (lands) r.state.t = target;
    state = std::move(r.state);

    const double s = safe_enstrophy(state.v);
    if (!std::isfinite(s) || (s0 > 0.0 && s > settings.blowup_ratio * s0)) {
      res.status = RunStatus::blowup_suspected;
      res.message = "enstrophy exceeded blow-up ratio";
      DiagRow row = make_row(state.t, state.v, settings, gp);
      emit(row);
      break;
    }

    if (lands) {
      DiagRow row = make_row(state.t, state.v, settings, gp);
      if (!row_finite(row)) {
        res.status = RunStatus::blowup_suspected;
        res.message = "non-finite diagnostics";
        break;
      }
      emit(row);
      next_record = static_cast<double>(++record_index) * settings.record_interval;
      if (row.boundary_frac > settings.guard_threshold && !res.untrusted_after) {
        res.untrusted_after = state.t;
        res.status = RunStatus::untrusted;
        res.message = "boundary guard exceeded";
        if (settings.stop_on_guard) break;
      }
    }
  }
  res.final_time = state.t;
  res.final_field = std::move(state.v);
  return res;
}

}  // namespace nskv
