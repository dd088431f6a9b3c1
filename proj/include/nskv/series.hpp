// Power series of the mild solution in the seed amplitude A.
//
// With v(0) = A v0 the solution is
//   v_A(t) = A g1(t) + sum_{p>=2} A^p c_p(t),
//   c_p(t) = int_0^t exp(-|k|^2 (t - s)) g_p(s) ds,
// where g1(s) = exp(-s|k|^2) v0 and, matching powers of A in the mild form,
//   g_p(s) = sum_{p1 + p2 = p} B(c_{p1}(s), c_{p2}(s)),   c_1 = g1.
// Pairs with p1, p2 > 1 are the double time integrals of the interior
// recursion; pairs with p1 = 1 or p2 = 1 are the boundary terms.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nskv/bilinear.hpp"
#include "nskv/lattice.hpp"

namespace nskv {

struct TimeGrid {
  double s_max = 0.0;
  int points = 64;  ///< including s = 0

  double spacing() const { return s_max / (points - 1); }
  double at(int i) const { return i * spacing(); }
};

/// g_p(k, s_i) and c_p(k, s_i) for p = 1..P on a uniform time grid.
class GpTable {
 public:
  GpTable(VecField seed, int max_order, TimeGrid grid);

  int max_order() const { return max_order_; }
  const TimeGrid& time_grid() const { return grid_; }
  const VecField& seed() const { return seed_; }
  /// Integrand term g_p at grid index i (p >= 1).
  const VecField& term(int p, int i) const;
  /// Accumulated coefficient c_p at grid index i (c_1 = g_1).
  const VecField& coefficient(int p, int i) const;

  /// Bytes needed to hold a table of this size.
  static std::size_t memory_estimate(const KLattice& lattice, int max_order, int points);

 private:
  friend GpTable compute_gp_table(const VecField&, int, const TimeGrid&, std::size_t);
  VecField seed_;
  int max_order_;
  TimeGrid grid_;
  std::vector<std::vector<VecField>> terms_;
  std::vector<std::vector<VecField>> coeffs_;
};

/// Fills orders 2..P by the recursion above; each c_p is the trapezoid
/// rule applied to the integrand exp(-|k|^2 (t - s)) g_p(s) on the grid.
/// Throws BudgetError if the table would exceed memory_budget bytes.
GpTable compute_gp_table(const VecField& seed, int max_order, const TimeGrid& grid,
                         std::size_t memory_budget = std::size_t(2) << 30);

/// Truncated series sum_{p <= P} A^p c_p(t) (c_1 = g1). Off-grid t is
/// handled by a partial trapezoid panel with linear interpolation of g_p.
VecField series_partial_sum(const GpTable& table, double amplitude, double t, int order);

/// Rescaled profile on the chart Y = (k - p k0) / sqrt(p), |Y_i| <= 3.
struct RescaledProfile {
  int order = 0;
  double spacing = 0.0;    ///< Y-grid spacing step / sqrt(p)
  int half_points = 0;     ///< Y-grid nodes per half-axis
  std::vector<Vec3> y;     ///< chart coordinates
  std::vector<Vec3> value; ///< interpolated g_p
};

RescaledProfile rescale_gp(const GpTable& table, int p, int time_index, const Vec3& k0,
                           double chart_radius = 3.0);

/// Rescale of a single field (the p-th term) on its chart.
RescaledProfile rescale_field(const VecField& f, int p, const Vec3& k0, double chart_radius = 3.0);

struct FixedPointFit {
  double c_hat = 0.0;
  double axial_residual = 0.0;  ///< ||third component|| / ||planar components||
};

/// Least-squares fit of the planar components to c (Y1, Y2) prod g(Y_i).
FixedPointFit fit_fixed_point(const RescaledProfile& profile);

enum class LambdaNorm { sup, l2 };

struct LambdaEstimate {
  std::vector<std::optional<double>> ratios;  ///< index p-1 holds Lambda_p, p = 1..P-1
  std::optional<double> working;              ///< last defined entry
};

/// Lambda_p(s) = ||g_{p+1}|| p / (||g_p|| (p + 1)).
LambdaEstimate estimate_lambda(const GpTable& table, int time_index, LambdaNorm norm = LambdaNorm::sup);

/// Same ratio from a list of per-order norms (index 0 is order 1).
LambdaEstimate lambda_from_norms(const std::vector<double>& norms);

struct BisectionBracket {
  double lo = 0.0;  ///< largest amplitude without blow-up suspicion
  double hi = 0.0;  ///< smallest amplitude with blow-up suspicion
  int runs = 0;
  bool found = false;
};

struct CriticalAmplitude {
  std::optional<double> from_lambda;  ///< 1 / Lambda_P(s)
  BisectionBracket bracket;
};

/// Critical amplitude from Lambda plus a bisection on evolution runs:
/// run(A) reports whether the amplitude-A run is blow-up suspected.
/// The bracket starts at `guess` and is widened by doubling / halving.
BisectionBracket bracket_critical_amplitude(const std::function<bool(double)>& blows_up, double guess,
                                            int bisection_steps = 6, int max_expansions = 12);

CriticalAmplitude estimate_critical_amplitude(const GpTable& table, int time_index,
                                              const std::function<bool(double)>& blows_up,
                                              int bisection_steps = 6);

}  // namespace nskv
