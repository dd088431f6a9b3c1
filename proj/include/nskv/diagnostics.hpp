// Physical-space reconstruction for antisymmetric fields and the flow
// observables built on it.
//
// For an antisymmetric v the inverse transform is real:
//   u(x) = step^3 sum_k v(k) sin<k,x>,   w(x) = step^3 sum_k (k x v(k)) cos<k,x>.
// Sums are evaluated directly, one axis at a time.
#pragma once

#include <string>
#include <vector>

#include "nskv/lattice.hpp"

namespace nskv {

/// 3-vector samples on an XGrid, x1 slowest.
struct PhysicalField {
  XGrid grid;
  Eigen::Matrix3Xd values;

  std::size_t index(int i0, int i1, int i2) const {
    return (static_cast<std::size_t>(i0) * grid.points[1] + i1) * grid.points[2] + i2;
  }
};

PhysicalField reconstruct_velocity(const VecField& v, const XGrid& grid);
PhysicalField reconstruct_vorticity(const VecField& v, const XGrid& grid);

/// Rules for the default observation box.
struct XGridPolicy {
  double axial_periods = 2.0;      ///< periods of 2 pi / a covered along x3
  int points_per_wavelength = 16;  ///< along x3
  int transverse_points = 0;       ///< 0: 4 N_perp (at least 32)
};

/// Box covering axial_periods wavelengths 2 pi / a along x3 and the full
/// transverse period [-pi/step, pi/step) across.
XGrid default_xgrid(const KLattice& lattice, double a, const XGridPolicy& policy = {});

struct MarginalSeries {
  std::string axis;  ///< "k3" or "x3"
  std::vector<double> coords;
  std::vector<double> times;
  std::vector<std::vector<double>> rows;
  std::vector<bool> decay_warning;

  double coord_step() const { return coords.size() > 1 ? coords[1] - coords[0] : 0.0; }
};

/// S3(k3) = (2pi)^3 step^2 sum_{k1,k2} |k|^2 |v|^2, one value per k3 plane.
std::vector<double> marginal_enstrophy_k3(const VecField& v);

struct X3Marginal {
  std::vector<double> x3;
  std::vector<double> density;
  bool decay_warning = false;  ///< transverse boundary not below 1e-6 of the max
};

/// Per-plane quadrature of |w|^2 over (x1, x2).
X3Marginal marginal_enstrophy_x3(const VecField& v, const XGrid& grid);

struct MaxSpeed {
  double value = 0.0;
  Vec3 location = Vec3::Zero();
};

/// Grid max of |u| followed by one refinement pass (spacing / 4 in a
/// two-spacing neighbourhood of the coarse argmax).
MaxSpeed max_speed(const VecField& v, const XGrid& grid);

enum class AlignmentMode { absolute, signed_cosine };

/// Energy-weighted mean of the velocity/vorticity cosine,
///   sum (|u|^2/2) c / sum (|u|^2/2), c = |<u,w>| / (|u||w|) (absolute mode).
/// Points where |u| or |w| is below 1e-10 of its grid maximum are skipped
/// (the angle is undefined there). Zero field gives 0.
double alignment_cosine(const PhysicalField& u, const PhysicalField& w,
                        AlignmentMode mode = AlignmentMode::absolute);
double alignment_cosine(const VecField& v, const XGrid& grid,
                        AlignmentMode mode = AlignmentMode::absolute);

struct Peak {
  bool interior = false;  ///< false: the maximum sits at an endpoint
  double t = 0.0;
  double value = 0.0;
};

/// Discrete argmax refined by the vertex of the parabola through the
/// neighbouring samples.
Peak detect_peak_time(const std::vector<double>& t, const std::vector<double>& y);

/// Interior local maxima of a sampled curve (strictly larger than both neighbours
/// after merging plateaus), returned as indices.
std::vector<std::size_t> local_maxima(const std::vector<double>& y);

}  // namespace nskv
