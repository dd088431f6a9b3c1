// Initial data: a single gaussian lobe centered at (0, 0, a) and its
// antisymmetrized two-lobe version, plus energy calibration.
#pragma once

#include <optional>

#include "nskv/lattice.hpp"

namespace nskv {

enum class SeedKind { zero, complex_lobe, antisymmetric };

/// Physical and lattice parameters of a seeded flow. Viscosity is 1.
struct FlowConfig {
  double a = 6.0;    ///< lobe center wavenumber
  double b = 3.0;    ///< cutoff radius around the lobe center
  double eps = 0.5;  ///< width of the cutoff transition
  std::optional<double> amplitude;      ///< A
  std::optional<double> target_energy;  ///< E0; A is calibrated from it
  double step = 1.0;
  Index3 half_extents{16, 16, 64};

  KLattice lattice() const { return KLattice(step, half_extents); }
  /// Throws ConfigError when a > b > 1, b < a - 1, 0 < eps < b or the
  /// amplitude choice is violated.
  void validate() const;
};

/// Standard gaussian density exp(-x^2/2) / sqrt(2 pi).
double gaussian_density(double x);

/// Smooth cutoff: 1 for |x| <= b - eps, 0 for |x| >= b, quintic smoothstep between.
double cutoff_chi(double x, double b, double eps);

/// v0(k) = A (k1, k2, -(k1^2+k2^2)/k3) g(k1) g(k2) g(k3-a) chi_b(k3-a).
/// Uses cfg.amplitude, or 1 when only a target energy is configured.
VecField build_complex_seed(const FlowConfig& cfg);

/// The same profile with both lobes, odd under k -> -k.
VecField build_antisym_seed(const FlowConfig& cfg);

struct Calibrated {
  VecField field;
  double amplitude;
};

/// Scales f so that parseval_energy equals target_energy.
Calibrated calibrate_amplitude(const VecField& f, double target_energy);

/// Builds the configured seed kind and applies the amplitude or energy calibration.
Calibrated build_seed(SeedKind kind, const FlowConfig& cfg);

}  // namespace nskv
