// Run configuration: `key = value` text with `#` comments.
#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "nskv/seed.hpp"

namespace nskv {

enum class Integrator { etd_rk2, picard };

struct RunConfig {
  std::string preset;
  SeedKind seed = SeedKind::antisymmetric;
  FlowConfig flow;
  Integrator integrator = Integrator::etd_rk2;
  double tau = 1.5625e-8;
  double horizon_tau = 24000.0;
  double record_every_tau = 400.0;
  int snapshot_every = 0;  ///< records between snapshots, 0 = none
  std::string out_dir = "out";
  double shell_fraction = 0.2;
  double guard_threshold = 1e-3;
  bool stop_on_guard = false;
  double max_correction = 1e-2;
  std::uint64_t rng_seed = 1;
  // series expansion
  int series_order = 6;
  int series_points = 64;
  double series_smax_tau = 0.0;  ///< 0: use horizon_tau
  double series_amplitude = 1.0;
  // Picard integrator / cross-checks
  int picard_steps = 64;
  double picard_tol = 1e-13;
  // scaling experiment
  int scaling_lambda = 2;
  double scaling_tolerance = 1e-3;
  int scaling_steps = 64;
  int scaling_levels = 3;
  // step control
  int steps_per_horizon = 4096;
  double memory_budget_mb = 2048.0;

  /// Keys explicitly set in the text (after preset expansion).
  std::map<std::string, std::string> echo;
};

/// Parses a configuration. Errors name the key and line. `seed` is
/// required unless a preset is given; exactly one of `amplitude` / `energy` is required for
/// non-zero seeds (a preset may supply it).
RunConfig parse_config(const std::string& text);

/// Applies a named preset ("desk", "paper2", "tiny", "scaling") to cfg. Throws ConfigError for unknown names.
void apply_preset(RunConfig& cfg, const std::string& name);

std::string to_string(SeedKind k);
std::string to_string(Integrator i);

}  // namespace nskv
