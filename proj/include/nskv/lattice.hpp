// Wavevector lattice, vector fields on it, and the nodewise/Parseval
// functionals used everywhere else.
//
// Field values are the real amplitudes v(k) of the transform
//   v(k) = i/(2pi)^3 \int u(x) exp(-i<k,x>) dx,
// so that uhat(k) = -i (2pi)^3 v(k). All k-integrals are Riemann sums
// with weight step^3.
#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <array>
#include <cstddef>

namespace nskv {

using Vec3 = Eigen::Vector3d;
using Index3 = std::array<int, 3>;

/// Truncated lattice k = step * (j1, j2, j3), |j_i| <= N_i.
///
/// Nodes are numbered with j1 slowest and j3 fastest. Because the lattice
/// is centrally symmetric, the node of -k is `node_count() - 1 - index(k)`.
class KLattice {
 public:
  KLattice() = default;
  KLattice(double step, Index3 half_extents);

  double step() const { return step_; }
  const Index3& half_extents() const { return half_; }
  int half_extent(int axis) const { return half_[axis]; }
  /// Number of nodes along an axis, 2 N + 1.
  int extent(int axis) const { return 2 * half_[axis] + 1; }
  std::size_t node_count() const { return count_; }
  double cell_volume() const { return step_ * step_ * step_; }

  bool contains(const Index3& j) const;
  std::size_t index(const Index3& j) const;
  Index3 coords(std::size_t node) const;
  Vec3 wavevector(std::size_t node) const;
  Vec3 wavevector(const Index3& j) const;
  std::size_t mirror(std::size_t node) const { return count_ - 1 - node; }
  std::size_t origin() const { return count_ / 2; }
  /// Nodes per j1 plane.
  std::size_t plane_size() const { return static_cast<std::size_t>(extent(1)) * extent(2); }

  friend bool operator==(const KLattice& a, const KLattice& b) {
    return a.step_ == b.step_ && a.half_ == b.half_;
  }

 private:
  double step_ = 1.0;
  Index3 half_{0, 0, 0};
  std::size_t count_ = 1;
};

struct FieldFlags {
  bool antisymmetric = false;
  bool solenoidal = false;
};

/// Real 3-vector field on a KLattice. Values are stored as a 3 x nodes
/// column-major matrix, i.e. node-ordered triplets.
class VecField {
 public:
  VecField() = default;
  explicit VecField(const KLattice& lattice);
  VecField(const KLattice& lattice, Eigen::Matrix3Xd values, FieldFlags flags = {});

  const KLattice& lattice() const { return lattice_; }
  Eigen::Matrix3Xd& values() { return values_; }
  const Eigen::Matrix3Xd& values() const { return values_; }
  auto operator[](std::size_t node) { return values_.col(static_cast<Eigen::Index>(node)); }
  auto operator[](std::size_t node) const { return values_.col(static_cast<Eigen::Index>(node)); }

  const FieldFlags& flags() const { return flags_; }
  FieldFlags& flags() { return flags_; }
  bool antisymmetric() const { return flags_.antisymmetric; }
  bool solenoidal() const { return flags_.solenoidal; }

  /// max_k |v(k)|
  double sup_norm() const;
  bool all_finite() const;

  VecField& operator+=(const VecField& o);
  VecField& operator-=(const VecField& o);
  VecField& operator*=(double s);

 private:
  KLattice lattice_;
  Eigen::Matrix3Xd values_;
  FieldFlags flags_;
};

VecField operator+(VecField a, const VecField& b);
VecField operator-(VecField a, const VecField& b);
VecField operator*(double s, VecField a);

/// Box [lo, hi] in physical space sampled with `points` per axis.
/// A closed grid includes both endpoints; an open one drops `hi`, which
/// is the natural sampling of one period.
struct XGrid {
  Vec3 lo = -Vec3::Ones();
  Vec3 hi = Vec3::Ones();
  std::array<int, 3> points{2, 2, 2};
  bool closed = true;

  XGrid() = default;
  XGrid(const Vec3& lo, const Vec3& hi, std::array<int, 3> points, bool closed = true);
  /// Closed box centered at the origin with the given side lengths.
  static XGrid centered(const Vec3& extent, std::array<int, 3> points);
  /// One full period [-pi/step, pi/step)^3 of a field on a lattice with this step.
  static XGrid periodic(double lattice_step, std::array<int, 3> points);

  double spacing(int axis) const;
  double coordinate(int axis, int i) const { return lo[axis] + i * spacing(axis); }
  std::size_t point_count() const {
    return static_cast<std::size_t>(points[0]) * points[1] * points[2];
  }
  double cell_volume() const { return spacing(0) * spacing(1) * spacing(2); }
};

// ---------------------------------------------------------------------------
// Nodewise operations

/// P_k v = v - <v,k>/|k|^2 k. Throws DomainError for k = 0.
Vec3 project_solenoidal(const Vec3& k, const Vec3& v);

/// Nodewise projection of a whole field; the k = 0 node is set to 0.
VecField project_solenoidal(const VecField& f);

/// w(k) = (f(k) - f(-k)) / 2.
VecField antisymmetrize(const VecField& f);

/// max_k |<f(k),k>| / max(1, |k||f(k)|).
double divergence_max(const VecField& f);

/// max_k |f(k) + f(-k)| / max(1e-300, sup|f|); 0 for an exactly odd field.
double antisymmetry_defect(const VecField& f);

/// E = (2pi)^3 / 2 * step^3 * sum |f|^2.
double parseval_energy(const VecField& f);

/// S = (2pi)^3 * step^3 * sum |k|^2 |f|^2. Requires a solenoidal field.
double parseval_enstrophy(const VecField& f);

/// w(k) = lambda^2 f(lambda k) on the lattice with half-extents floor(N/lambda).
VecField lattice_rescale_map(const VecField& f, int lambda);

inline constexpr double kTwoPiCubed = 248.05021344239853;  // (2 pi)^3

}  // namespace nskv
