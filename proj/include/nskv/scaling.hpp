// Nested-lattice check of the scaling symmetry v -> lam^2 v(lam k, t / lam^2).
#pragma once

#include <vector>

#include "nskv/seed.hpp"

namespace nskv {

struct ScalingLevel {
  double step = 0.0;
  Index3 fine_half{};
  Index3 coarse_half{};
  double error = 0.0;            ///< ||R(v(T / lam^2)) - w(T)|| / ||w(T)||
  double nonlinear_share = 0.0;  ///< ||w(T) - heat(w0, T)|| / ||w(T)||
};

struct ScalingReport {
  int lambda = 2;
  double horizon = 0.0;
  int steps = 0;
  std::vector<ScalingLevel> levels;  ///< coarsest mesh first, last one is the configured mesh
  bool decreasing = false;
  double tolerance = 0.0;
  bool within_tolerance = false;
};

/// Runs the fine seed on cfg's lattice to T / lam^2 and its rescaled image
/// lattice_rescale_map(seed, lam) to T, both with `steps` ETD-RK2 steps, and
/// compares rescale(fine) with coarse. Repeated on `levels` meshes: the
/// configured step and 2^j coarser ones over the same k-extent.
ScalingReport verify_scaling(SeedKind kind, const FlowConfig& cfg, int lambda, double horizon, int steps,
                             int levels, double tolerance);

}  // namespace nskv
