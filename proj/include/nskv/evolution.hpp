// Time marching of the mild form
//
//   v(t) = exp(-|k|^2 t) v0 + int_0^t exp(-|k|^2 (t - s)) B(v, v)(s) ds.
//
// Two routes: an exponential two-stage integrator (ETD-RK2) and Picard
// iteration on a uniform time grid with trapezoid quadrature.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nskv/bilinear.hpp"
#include "nskv/diagnostics.hpp"
#include "nskv/lattice.hpp"
#include "nskv/seed.hpp"

namespace nskv {

/// Multiplies every node by exp(-|k|^2 h). Throws DomainError for h < 0.
VecField heat_step(const VecField& v, double h);

/// (e^z - 1) / z and (e^z - 1 - z) / z^2, with series for |z| < 1e-3.
double phi1(double z);
double phi2(double z);

struct StepStats {
  double sup_norm = 0.0;
  double correction = 0.0;  ///< sup|corrector - predictor| / sup|v+|
};

struct StepperState {
  double t = 0.0;
  VecField v;
  double h = 0.0;
  StepStats stats;
};

enum class StepStatus { ok, blowup_suspected };

struct StepResult {
  StepperState state;
  StepStatus status = StepStatus::ok;
};

/// One ETD-RK2 step of size state.h:
///   a  = e^{-k^2 h} v + h phi1(-k^2 h) B(v,v)
///   v+ = a + h phi2(-k^2 h) (B(a,a) - B(v,v))
/// Antisymmetric input is re-antisymmetrized on output. Non-finite values
/// give StepStatus::blowup_suspected.
StepResult etd_rk2_step(const StepperState& state, ConvPlan& plan);

/// Fixed-step ETD-RK2 march of v0 to time T with n steps.
VecField etd_rk2_march(const VecField& v0, double T, int n_steps, ConvPlan& plan);

struct PicardResult {
  VecField v;      ///< v(T)
  int iterations;  ///< iterations until the sup-norm change dropped below tol
  double last_change;
};

/// Picard iteration of the mild form on an n_steps uniform grid of [0, T].
/// Throws NoConvergenceError when the change grows for 3 consecutive
/// iterations or max_iterations is exceeded.
PicardResult picard_solve(const VecField& v0, double T, int n_steps, double tol, ConvPlan& plan,
                          int max_iterations = 200);

/// Fraction of enstrophy on nodes with |k1| or |k2| above (1 - shell) N step.
double boundary_guard(const VecField& v, double shell_fraction);

/// Time unit used for all run I/O (seconds of the unit flow with nu = 1).
inline constexpr double kTimeUnit = 1.5625e-8;

struct DiagRow {
  double t = 0.0;
  double energy = 0.0;
  double enstrophy = 0.0;
  double max_speed = 0.0;
  double align_cos = 0.0;
  double boundary_frac = 0.0;
};

struct DiagSeries {
  std::vector<DiagRow> rows;
  void push(const DiagRow& r);  ///< enforces strictly increasing t
};

enum class RunStatus { completed, blowup_suspected, untrusted };

std::string to_string(RunStatus s);

struct SimulationSettings {
  double horizon = 0.0;          ///< absolute time
  double record_interval = 0.0;  ///< absolute time between diagnostic rows
  double tau = kTimeUnit;
  double shell_fraction = 0.2;
  double guard_threshold = 1e-3;
  bool stop_on_guard = true;
  double blowup_ratio = 1e6;   ///< S(t) / S(0) that counts as blow-up
  double h_min_tau = 1e-6;     ///< smallest step, in tau units
  double max_correction = 1e-2;  ///< step rejected above this relative correction
  int steps_per_horizon = 4096;
  int reevaluate_every = 16;
  bool physical = true;  ///< compute max_speed / alignment (antisymmetric fields only)
  std::optional<double> fixed_step;  ///< bypass step control
  XGridPolicy grid;
};

struct RunEvent {
  std::size_t record = 0;
  const DiagRow* row = nullptr;
  const VecField* field = nullptr;
};

struct SimulationResult {
  DiagSeries series;
  RunStatus status = RunStatus::completed;
  std::optional<double> untrusted_after;  ///< t* of the first guard violation
  double final_time = 0.0;
  long steps = 0;
  long rejected = 0;
  VecField final_field;
  std::string message;
};

/// Marches `seed` to the horizon, recording a DiagRow every record_interval
/// and calling on_record for each (for snapshots / marginals).
SimulationResult run_simulation(const VecField& seed, const SimulationSettings& settings,
                                const std::function<void(const RunEvent&)>& on_record = {});

/// Default step: min(0.25 / |k|^2 of the active support, horizon / steps).
double default_step(const VecField& v, double horizon, int steps_per_horizon);

}  // namespace nskv
