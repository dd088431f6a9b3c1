#include "nskv/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "nskv/error.hpp"
#include "nskv/parallel.hpp"

namespace nskv {

// ---------------------------------------------------------------------------
// KLattice

KLattice::KLattice(double step, Index3 half_extents) : step_(step), half_(half_extents) {
  if (!(step > 0.0) || !std::isfinite(step)) throw DomainError("lattice step must be positive");
  count_ = 1;
  for (int a = 0; a < 3; ++a) {
    if (half_[a] < 0) throw DomainError("lattice half-extents must be non-negative");
    count_ *= static_cast<std::size_t>(2 * half_[a] + 1);
  }
}

bool KLattice::contains(const Index3& j) const {
  for (int a = 0; a < 3; ++a)
    if (j[a] < -half_[a] || j[a] > half_[a]) return false;
  return true;
}

std::size_t KLattice::index(const Index3& j) const {
  const auto i0 = static_cast<std::size_t>(j[0] + half_[0]);
  const auto i1 = static_cast<std::size_t>(j[1] + half_[1]);
  const auto i2 = static_cast<std::size_t>(j[2] + half_[2]);
  return (i0 * extent(1) + i1) * extent(2) + i2;
}

Index3 KLattice::coords(std::size_t node) const {
  const auto n2 = static_cast<std::size_t>(extent(2));
  const auto n1 = static_cast<std::size_t>(extent(1));
  const int i2 = static_cast<int>(node % n2);
  const int i1 = static_cast<int>((node / n2) % n1);
  const int i0 = static_cast<int>(node / (n1 * n2));
  return {i0 - half_[0], i1 - half_[1], i2 - half_[2]};
}

Vec3 KLattice::wavevector(const Index3& j) const {
  return Vec3(step_ * j[0], step_ * j[1], step_ * j[2]);
}

Vec3 KLattice::wavevector(std::size_t node) const { return wavevector(coords(node)); }

// ---------------------------------------------------------------------------
// VecField

VecField::VecField(const KLattice& lattice)
    : lattice_(lattice),
      values_(Eigen::Matrix3Xd::Zero(3, static_cast<Eigen::Index>(lattice.node_count()))),
      flags_{true, true} {}

VecField::VecField(const KLattice& lattice, Eigen::Matrix3Xd values, FieldFlags flags)
    : lattice_(lattice), values_(std::move(values)), flags_(flags) {
  if (values_.cols() != static_cast<Eigen::Index>(lattice_.node_count()))
    throw DomainError("field value count does not match lattice node count");
}

double VecField::sup_norm() const {
  if (values_.cols() == 0) return 0.0;
  return values_.colwise().norm().maxCoeff();
}

bool VecField::all_finite() const { return values_.allFinite(); }

namespace {
void require_same_lattice(const KLattice& a, const KLattice& b) {
  if (!(a == b)) throw DomainError("fields live on different lattices");
}
}  // namespace

VecField& VecField::operator+=(const VecField& o) {
  require_same_lattice(lattice_, o.lattice_);
  values_ += o.values_;
  flags_.antisymmetric = flags_.antisymmetric && o.flags_.antisymmetric;
  flags_.solenoidal = flags_.solenoidal && o.flags_.solenoidal;
  return *this;
}

VecField& VecField::operator-=(const VecField& o) {
  require_same_lattice(lattice_, o.lattice_);
  values_ -= o.values_;
  flags_.antisymmetric = flags_.antisymmetric && o.flags_.antisymmetric;
  flags_.solenoidal = flags_.solenoidal && o.flags_.solenoidal;
  return *this;
}

VecField& VecField::operator*=(double s) {
  values_ *= s;
  return *this;
}

VecField operator+(VecField a, const VecField& b) { return a += b; }
VecField operator-(VecField a, const VecField& b) { return a -= b; }
VecField operator*(double s, VecField a) { return a *= s; }

// ---------------------------------------------------------------------------
// XGrid

XGrid::XGrid(const Vec3& lo_, const Vec3& hi_, std::array<int, 3> points_, bool closed_)
    : lo(lo_), hi(hi_), points(points_), closed(closed_) {
  for (int a = 0; a < 3; ++a) {
    if (points[a] < 2) throw DomainError("x-grid needs at least 2 points per axis");
    if (!(hi[a] > lo[a])) throw DomainError("x-grid extent must be positive");
  }
}

XGrid XGrid::centered(const Vec3& extent, std::array<int, 3> points) {
  return XGrid(-0.5 * extent, 0.5 * extent, points, true);
}

XGrid XGrid::periodic(double lattice_step, std::array<int, 3> points) {
  const double half = std::numbers::pi / lattice_step;
  return XGrid(Vec3::Constant(-half), Vec3::Constant(half), points, false);
}

double XGrid::spacing(int axis) const {
  const double len = hi[axis] - lo[axis];
  return closed ? len / (points[axis] - 1) : len / points[axis];
}

// ---------------------------------------------------------------------------
// Nodewise operations

Vec3 project_solenoidal(const Vec3& k, const Vec3& v) {
  const double k2 = k.squaredNorm();
  if (k2 == 0.0) throw DomainError("solenoidal projector is undefined at k = 0");
  return v - (v.dot(k) / k2) * k;
}

VecField project_solenoidal(const VecField& f) {
  const KLattice& lat = f.lattice();
  Eigen::Matrix3Xd out(3, f.values().cols());
  const std::size_t plane = lat.plane_size();
  for_each_slab(static_cast<std::size_t>(lat.extent(0)), [&](std::size_t s) {
    for (std::size_t n = s * plane; n < (s + 1) * plane; ++n) {
      const Vec3 k = lat.wavevector(n);
      const double k2 = k.squaredNorm();
      const Vec3 v = f[n];
      out.col(static_cast<Eigen::Index>(n)) = k2 == 0.0 ? Vec3::Zero() : Vec3(v - (v.dot(k) / k2) * k);
    }
  });
  return VecField(lat, std::move(out), {f.antisymmetric(), true});
}

VecField antisymmetrize(const VecField& f) {
  const KLattice& lat = f.lattice();
  const std::size_t n = lat.node_count();
  Eigen::Matrix3Xd out(3, f.values().cols());
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    const auto m = static_cast<Eigen::Index>(lat.mirror(i));
    out.col(c) = 0.5 * (f.values().col(c) - f.values().col(m));
  }
  out.col(static_cast<Eigen::Index>(lat.origin())).setZero();
  return VecField(lat, std::move(out), {true, f.solenoidal()});
}

double divergence_max(const VecField& f) {
  const KLattice& lat = f.lattice();
  const std::size_t plane = lat.plane_size();
  return max_slabs(static_cast<std::size_t>(lat.extent(0)), 0.0, [&](std::size_t s) {
    double m = 0.0;
    for (std::size_t n = s * plane; n < (s + 1) * plane; ++n) {
      const Vec3 k = lat.wavevector(n);
      const Vec3 v = f[n];
      const double r = std::abs(v.dot(k)) / std::max(1.0, k.norm() * v.norm());
      m = std::max(m, r);
    }
    return m;
  });
}

double antisymmetry_defect(const VecField& f) {
  const KLattice& lat = f.lattice();
  double m = 0.0;
  for (std::size_t i = 0; i < lat.node_count(); ++i) m = std::max(m, (f[i] + f[lat.mirror(i)]).norm());
  return m / std::max(1e-300, f.sup_norm());
}

double parseval_energy(const VecField& f) {
  const KLattice& lat = f.lattice();
  const std::size_t plane = lat.plane_size();
  const double sum = reduce_slabs(static_cast<std::size_t>(lat.extent(0)), 0.0, [&](std::size_t s) {
    return f.values().middleCols(static_cast<Eigen::Index>(s * plane), static_cast<Eigen::Index>(plane))
        .squaredNorm();
  });
  return 0.5 * kTwoPiCubed * lat.cell_volume() * sum;
}

double parseval_enstrophy(const VecField& f) {
  const double div = divergence_max(f);
  if (div > 1e-6)
    throw PreconditionError("enstrophy needs a solenoidal field (divergence " + std::to_string(div) + ")");
  const KLattice& lat = f.lattice();
  const std::size_t plane = lat.plane_size();
  const double sum = reduce_slabs(static_cast<std::size_t>(lat.extent(0)), 0.0, [&](std::size_t s) {
    double acc = 0.0;
    for (std::size_t n = s * plane; n < (s + 1) * plane; ++n)
      acc += lat.wavevector(n).squaredNorm() * f[n].squaredNorm();
    return acc;
  });
  return kTwoPiCubed * lat.cell_volume() * sum;
}

VecField lattice_rescale_map(const VecField& f, int lambda) {
  if (lambda <= 0) throw DomainError("rescale factor must be a positive integer");
  const KLattice& src = f.lattice();
  const Index3& h = src.half_extents();
  const KLattice dst(src.step(), {h[0] / lambda, h[1] / lambda, h[2] / lambda});
  Eigen::Matrix3Xd out(3, static_cast<Eigen::Index>(dst.node_count()));
  const double l2 = static_cast<double>(lambda) * lambda;
  for (std::size_t n = 0; n < dst.node_count(); ++n) {
    const Index3 j = dst.coords(n);
    const Index3 js{lambda * j[0], lambda * j[1], lambda * j[2]};
    out.col(static_cast<Eigen::Index>(n)) = l2 * f[src.index(js)];
  }
  return VecField(dst, std::move(out), f.flags());
}

}  // namespace nskv
