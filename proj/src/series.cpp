#include "nskv/series.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nskv/error.hpp"
#include "nskv/evolution.hpp"
#include "nskv/seed.hpp"

namespace nskv {

GpTable::GpTable(VecField seed, int max_order, TimeGrid grid)
    : seed_(std::move(seed)), max_order_(max_order), grid_(grid) {}

const VecField& GpTable::term(int p, int i) const {
  if (p < 1 || p > max_order_ || i < 0 || i >= grid_.points) throw DomainError("gp table index out of range");
  return terms_[static_cast<std::size_t>(p - 1)][static_cast<std::size_t>(i)];
}

const VecField& GpTable::coefficient(int p, int i) const {
  if (p < 1 || p > max_order_ || i < 0 || i >= grid_.points) throw DomainError("gp table index out of range");
  return coeffs_[static_cast<std::size_t>(p - 1)][static_cast<std::size_t>(i)];
}

std::size_t GpTable::memory_estimate(const KLattice& lattice, int max_order, int points) {
  // terms + coefficients, plus FFT scratch of roughly eight padded arrays
  const std::size_t field = lattice.node_count() * 3 * sizeof(double);
  std::size_t padded = 1;
  for (int a = 0; a < 3; ++a) padded *= static_cast<std::size_t>(fft_friendly_length(2 * lattice.extent(a) - 1));
  return 2 * field * static_cast<std::size_t>(max_order) * points + 8 * padded * sizeof(double);
}

GpTable compute_gp_table(const VecField& seed, int max_order, const TimeGrid& grid, std::size_t memory_budget) {
  if (max_order < 1) throw DomainError("series order must be >= 1");
  if (grid.points < 2 || !(grid.s_max > 0.0)) throw DomainError("time grid needs >= 2 points and s_max > 0");
  const KLattice& lat = seed.lattice();
  const std::size_t need = GpTable::memory_estimate(lat, max_order, grid.points);
  if (need > memory_budget)
    throw BudgetError("gp table needs " + std::to_string(need) + " bytes, budget is " +
                      std::to_string(memory_budget));

  GpTable table(seed, max_order, grid);
  const auto P = static_cast<std::size_t>(max_order);
  const auto m = static_cast<std::size_t>(grid.points);
  table.terms_.assign(P, std::vector<VecField>(m));
  table.coeffs_.assign(P, std::vector<VecField>(m));

  for (std::size_t i = 0; i < m; ++i) {
    table.terms_[0][i] = heat_step(seed, grid.at(static_cast<int>(i)));
    table.coeffs_[0][i] = table.terms_[0][i];
  }

  const std::size_t nodes = lat.node_count();
  const double dt = grid.spacing();
  std::vector<double> decay(nodes);
  for (std::size_t n = 0; n < nodes; ++n) decay[n] = std::exp(-lat.wavevector(n).squaredNorm() * dt);

  ConvPlan plan(lat);
  for (std::size_t p = 2; p <= P; ++p) {
    auto& g = table.terms_[p - 1];
    for (std::size_t i = 0; i < m; ++i) {
      VecField acc(lat);
      acc.flags() = {seed.antisymmetric(), true};
      for (std::size_t p1 = 1; p1 < p; ++p1) {
        const std::size_t p2 = p - p1;
        acc += plan.apply(table.coeffs_[p1 - 1][i], table.coeffs_[p2 - 1][i]);
      }
      if (seed.antisymmetric()) acc = antisymmetrize(acc);
      g[i] = std::move(acc);
    }
    auto& c = table.coeffs_[p - 1];
    c[0] = VecField(lat);
    c[0].flags() = g[0].flags();
    for (std::size_t i = 1; i < m; ++i) {
      VecField next(lat);
      next.flags() = g[i].flags();
      for (std::size_t n = 0; n < nodes; ++n)
        next[n] = decay[n] * (c[i - 1][n] + 0.5 * dt * g[i - 1][n]) + 0.5 * dt * g[i][n];
      c[i] = std::move(next);
    }
  }
  return table;
}

VecField series_partial_sum(const GpTable& table, double amplitude, double t, int order) {
  const TimeGrid& grid = table.time_grid();
  if (t < 0.0 || t > grid.s_max * (1.0 + 1e-12)) throw DomainError("time outside the gp table grid");
  if (order < 1 || order > table.max_order()) throw DomainError("series order outside the table");
  const KLattice& lat = table.seed().lattice();
  const double dt = grid.spacing();
  int i = std::min(grid.points - 1, static_cast<int>(std::floor(t / dt)));
  double rest = t - grid.at(i);
  if (rest < 1e-14 * std::max(1.0, grid.s_max)) rest = 0.0;

  VecField sum = amplitude * heat_step(table.seed(), t);
  double ap = amplitude;
  for (int p = 2; p <= order; ++p) {
    ap *= amplitude;
    if (rest == 0.0) {
      sum += ap * table.coefficient(p, i);
      continue;
    }
    const VecField& g0 = table.term(p, i);
    const VecField& g1 = table.term(p, i + 1);
    const double theta = rest / dt;
    VecField c = table.coefficient(p, i);
    for (std::size_t n = 0; n < lat.node_count(); ++n) {
      const double e = std::exp(-lat.wavevector(n).squaredNorm() * rest);
      const Vec3 gt = (1.0 - theta) * g0[n] + theta * g1[n];
      c[n] = e * (c[n] + 0.5 * rest * g0[n]) + 0.5 * rest * gt;
    }
    sum += ap * c;
  }
  if (table.seed().antisymmetric()) sum = antisymmetrize(sum);
  return sum;
}

// ---------------------------------------------------------------------------
// Rescaled charts

namespace {

Vec3 trilinear(const VecField& f, const Vec3& k) {
  const KLattice& lat = f.lattice();
  Index3 base{};
  double frac[3];
  for (int a = 0; a < 3; ++a) {
    const double x = k[a] / lat.step();
    const int h = lat.half_extent(a);
    if (x < -h - 1e-9 || x > h + 1e-9) throw DomainError("rescaled chart leaves the lattice");
    int b = static_cast<int>(std::floor(x));
    b = std::clamp(b, -h, std::max(-h, h - 1));
    base[a] = b;
    frac[a] = h == 0 ? 0.0 : x - b;
  }
  Vec3 out = Vec3::Zero();
  for (int c = 0; c < 8; ++c) {
    Index3 j = base;
    double w = 1.0;
    for (int a = 0; a < 3; ++a) {
      const int bit = (c >> a) & 1;
      w *= bit ? frac[a] : 1.0 - frac[a];
      j[a] += bit;
    }
    if (w == 0.0) continue;
    out += w * f[lat.index(j)];
  }
  return out;
}

}  // namespace

RescaledProfile rescale_field(const VecField& f, int p, const Vec3& k0, double chart_radius) {
  if (p < 1) throw DomainError("order must be >= 1");
  RescaledProfile prof;
  prof.order = p;
  const double sp = std::sqrt(static_cast<double>(p));
  prof.spacing = f.lattice().step() / sp;
  prof.half_points = static_cast<int>(std::floor(chart_radius / prof.spacing + 1e-9));
  const int h = prof.half_points;
  const Vec3 center = p * k0;
  for (int a = -h; a <= h; ++a)
    for (int b = -h; b <= h; ++b)
      for (int c = -h; c <= h; ++c) {
        const Vec3 y = prof.spacing * Vec3(a, b, c);
        prof.y.push_back(y);
        prof.value.push_back(trilinear(f, center + sp * y));
      }
  return prof;
}

RescaledProfile rescale_gp(const GpTable& table, int p, int time_index, const Vec3& k0, double chart_radius) {
  return rescale_field(table.term(p, time_index), p, k0, chart_radius);
}

FixedPointFit fit_fixed_point(const RescaledProfile& profile) {
  double num = 0.0, den = 0.0, planar = 0.0, axial = 0.0;
  for (std::size_t i = 0; i < profile.y.size(); ++i) {
    const Vec3& y = profile.y[i];
    const Vec3& h = profile.value[i];
    const double G = gaussian_density(y.x()) * gaussian_density(y.y()) * gaussian_density(y.z());
    num += (h.x() * y.x() + h.y() * y.y()) * G;
    den += (y.x() * y.x() + y.y() * y.y()) * G * G;
    planar += h.x() * h.x() + h.y() * h.y();
    axial += h.z() * h.z();
  }
  if (!(planar > 1e-300) || !(den > 0.0)) throw DomainError("degenerate profile: planar components vanish");
  return {num / den, std::sqrt(axial / planar)};
}

// ---------------------------------------------------------------------------
// Growth factor and critical amplitude

LambdaEstimate lambda_from_norms(const std::vector<double>& norms) {
  LambdaEstimate est;
  if (norms.size() < 2) return est;
  const double top = *std::max_element(norms.begin(), norms.end());
  // Norms below this floor are FFT roundoff of an identically zero term.
  const double floor = 1e-13 * top;
  for (std::size_t i = 0; i + 1 < norms.size(); ++i) {
    const double p = static_cast<double>(i + 1);
    if (!(norms[i] > floor) || !(norms[i + 1] > floor)) {
      est.ratios.emplace_back(std::nullopt);
      continue;
    }
    est.ratios.emplace_back(norms[i + 1] * p / (norms[i] * (p + 1.0)));
  }
  for (auto it = est.ratios.rbegin(); it != est.ratios.rend(); ++it)
    if (*it) {
      est.working = *it;
      break;
    }
  return est;
}

LambdaEstimate estimate_lambda(const GpTable& table, int time_index, LambdaNorm norm) {
  std::vector<double> norms;
  for (int p = 1; p <= table.max_order(); ++p) {
    const VecField& g = table.term(p, time_index);
    norms.push_back(norm == LambdaNorm::sup ? g.sup_norm() : g.values().norm());
  }
  return lambda_from_norms(norms);
}

BisectionBracket bracket_critical_amplitude(const std::function<bool(double)>& blows_up, double guess,
                                            int bisection_steps, int max_expansions) {
  if (!(guess > 0.0)) throw DomainError("bracket guess must be positive");
  BisectionBracket br;
  auto run = [&](double a) {
    ++br.runs;
    return blows_up(a);
  };
  if (run(guess)) {
    br.hi = guess;
    double a = guess;
    for (int i = 0; i < max_expansions; ++i) {
      a *= 0.5;
      if (!run(a)) {
        br.lo = a;
        br.found = true;
        break;
      }
      br.hi = a;
    }
  } else {
    br.lo = guess;
    double a = guess;
    for (int i = 0; i < max_expansions; ++i) {
      a *= 2.0;
      if (run(a)) {
        br.hi = a;
        br.found = true;
        break;
      }
      br.lo = a;
    }
  }
  if (!br.found) return br;
  for (int i = 0; i < bisection_steps; ++i) {
    const double mid = std::sqrt(br.lo * br.hi);
    if (run(mid)) br.hi = mid;
    else br.lo = mid;
  }
  return br;
}

CriticalAmplitude estimate_critical_amplitude(const GpTable& table, int time_index,
                                              const std::function<bool(double)>& blows_up, int bisection_steps) {
  CriticalAmplitude out;
  const LambdaEstimate lam = estimate_lambda(table, time_index);
  if (!lam.working) throw DomainError("growth factor undefined: higher-order terms vanish");
  out.from_lambda = 1.0 / *lam.working;
  if (blows_up) out.bracket = bracket_critical_amplitude(blows_up, *out.from_lambda, bisection_steps);
  return out;
}

}  // namespace nskv
