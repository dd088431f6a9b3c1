#include "nskv/seed.hpp"

#include <cmath>
#include <numbers>

#include "nskv/error.hpp"

namespace nskv {

void FlowConfig::validate() const {
  if (!(a > 0.0)) throw ConfigError("a must be positive");
  if (!(b > 1.0 && b < a)) throw ConfigError("need a > b > 1");
  if (!(b < a - 1.0)) throw ConfigError("need b < a - 1 to keep the seed away from k3 = 0");
  if (!(eps > 0.0 && eps < b)) throw ConfigError("need 0 < eps < b");
  if (amplitude.has_value() == target_energy.has_value())
    throw ConfigError("exactly one of amplitude / target energy must be given");
  if (amplitude && !(*amplitude > 0.0)) throw ConfigError("amplitude must be positive");
  if (target_energy && !(*target_energy > 0.0)) throw ConfigError("target energy must be positive");
  if (!(step > 0.0)) throw ConfigError("lattice step must be positive");
  for (int h : half_extents)
    if (h < 1) throw ConfigError("lattice half-extents must be >= 1");
}

double gaussian_density(double x) {
  return std::exp(-0.5 * x * x) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
}

double cutoff_chi(double x, double b, double eps) {
  if (!(eps > 0.0 && eps < b)) throw DomainError("cutoff needs 0 < eps < b");
  const double r = std::abs(x);
  if (r <= b - eps) return 1.0;
  if (r >= b) return 0.0;
  const double u = (r - (b - eps)) / eps;
  return 1.0 - u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
}

namespace {

void check_support(const FlowConfig& cfg) {
  const KLattice lat = cfg.lattice();
  const double k3max = lat.half_extent(2) * lat.step();
  if (k3max < cfg.a + cfg.b)
    throw ConfigError("lattice does not reach k3 = a + b; increase n3");
  // Six gaussian widths transversally.
  for (int ax = 0; ax < 2; ++ax)
    if (lat.half_extent(ax) * lat.step() < 6.0)
      throw ConfigError("lattice must extend at least 6 units transversally");
}

// Shared profile for one lobe centered at k3 = center.
Vec3 lobe(const Vec3& k, double center, const FlowConfig& cfg) {
  const double d = k.z() - center;
  const double chi = cutoff_chi(d, cfg.b, cfg.eps);
  if (chi == 0.0) return Vec3::Zero();
  const double env = gaussian_density(k.x()) * gaussian_density(k.y()) * gaussian_density(d) * chi;
  const double rho2 = k.x() * k.x() + k.y() * k.y();
  return env * Vec3(k.x(), k.y(), -rho2 / k.z());
}

}  // namespace

VecField build_complex_seed(const FlowConfig& cfg) {
  check_support(cfg);
  const KLattice lat = cfg.lattice();
  const double A = cfg.amplitude.value_or(1.0);
  VecField f(lat);
  for (std::size_t n = 0; n < lat.node_count(); ++n) f[n] = A * lobe(lat.wavevector(n), cfg.a, cfg);
  f.flags() = {false, true};
  return f;
}

VecField build_antisym_seed(const FlowConfig& cfg) {
  check_support(cfg);
  const KLattice lat = cfg.lattice();
  const double A = cfg.amplitude.value_or(1.0);
  VecField f(lat);
  for (std::size_t n = 0; n < lat.node_count(); ++n) {
    const Vec3 k = lat.wavevector(n);
    f[n] = A * (lobe(k, cfg.a, cfg) + lobe(k, -cfg.a, cfg));
  }
  f.flags() = {true, true};
  return f;
}

Calibrated calibrate_amplitude(const VecField& f, double target_energy) {
  if (!(target_energy > 0.0)) throw DomainError("target energy must be positive");
  const double e = parseval_energy(f);
  if (!(e > 0.0)) throw DomainError("cannot calibrate a zero field");
  const double A = std::sqrt(target_energy / e);
  if (A == 1.0) return {f, 1.0};
  return {A * f, A};
}

Calibrated build_seed(SeedKind kind, const FlowConfig& cfg) {
  cfg.validate();
  if (kind == SeedKind::zero) return {VecField(cfg.lattice()), 0.0};
  VecField base = kind == SeedKind::complex_lobe ? build_complex_seed(cfg) : build_antisym_seed(cfg);
  if (cfg.target_energy) return calibrate_amplitude(base, *cfg.target_energy);
  return {std::move(base), *cfg.amplitude};
}

}  // namespace nskv
