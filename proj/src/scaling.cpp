#include "nskv/scaling.hpp"

#include <cmath>

#include "nskv/bilinear.hpp"
#include "nskv/error.hpp"
#include "nskv/evolution.hpp"

namespace nskv {

ScalingReport verify_scaling(SeedKind kind, const FlowConfig& cfg, int lambda, double horizon, int steps,
                             int levels, double tolerance) {
  if (lambda < 2) throw ConfigError("scaling factor must be an integer >= 2");
  if (levels < 1) throw ConfigError("need at least one mesh level");
  if (!(horizon > 0.0) || steps < 1) throw ConfigError("scaling horizon and steps must be positive");
  ScalingReport rep;
  rep.lambda = lambda;
  rep.horizon = horizon;
  rep.steps = steps;
  rep.tolerance = tolerance;
  const double l2 = static_cast<double>(lambda) * lambda;

  for (int j = levels - 1; j >= 0; --j) {
    FlowConfig c = cfg;
    const int m = 1 << j;
    for (int a = 0; a < 3; ++a) {
      if (cfg.half_extents[a] % (m * lambda) != 0)
        throw ConfigError("half-extents must be divisible by lambda * 2^(levels-1)");
      c.half_extents[a] = cfg.half_extents[a] / m;
    }
    c.step = cfg.step * m;
    const VecField v0 = build_seed(kind, c).field;
    const VecField w0 = lattice_rescale_map(v0, lambda);
    ConvPlan fine_plan(v0.lattice());
    ConvPlan coarse_plan(w0.lattice());
    const VecField v = etd_rk2_march(v0, horizon / l2, steps, fine_plan);
    const VecField w = etd_rk2_march(w0, horizon, steps, coarse_plan);
    const VecField r = lattice_rescale_map(v, lambda);

    ScalingLevel lv;
    lv.step = c.step;
    lv.fine_half = c.half_extents;
    lv.coarse_half = w0.lattice().half_extents();
    const double norm = w.values().norm();
    lv.error = norm > 0.0 ? (r.values() - w.values()).norm() / norm : (r.values() - w.values()).norm();
    lv.nonlinear_share = norm > 0.0 ? (w.values() - heat_step(w0, horizon).values()).norm() / norm : 0.0;
    rep.levels.push_back(lv);
  }
  rep.decreasing = true;
  for (std::size_t i = 1; i < rep.levels.size(); ++i)
    if (!(rep.levels[i].error < rep.levels[i - 1].error)) rep.decreasing = false;
  rep.within_tolerance = rep.levels.back().error <= tolerance;
  return rep;
}

}  // namespace nskv
