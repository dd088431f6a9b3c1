#include "nskv/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "nskv/error.hpp"
#include "nskv/parallel.hpp"

namespace nskv {

namespace {

using cplx = std::complex<double>;

void require_antisymmetric(const VecField& v) {
  if (!v.antisymmetric() || antisymmetry_defect(v) > 1e-10)
    throw PreconditionError("physical reconstruction needs an antisymmetric field");
}

// sum_k F(k) exp(i <k, x>) on the grid, one axis at a time. Returns the
// imaginary part (sine sums) or the real part (cosine sums), times step^3.
PhysicalField synthesize(const KLattice& lat, const Eigen::Matrix3Xd& coeff, const XGrid& grid,
                         bool imaginary) {
  const int n0 = lat.extent(0), n1 = lat.extent(1), n2 = lat.extent(2);
  const int m0 = grid.points[0], m1 = grid.points[1], m2 = grid.points[2];

  auto table = [&](int axis, int n, int m) {
    std::vector<cplx> e(static_cast<std::size_t>(n) * m);
    for (int i = 0; i < n; ++i) {
      const double k = lat.step() * (i - lat.half_extent(axis));
      for (int x = 0; x < m; ++x) e[static_cast<std::size_t>(i) * m + x] = std::polar(1.0, k * grid.coordinate(axis, x));
    }
    return e;
  };
  const auto e0 = table(0, n0, m0), e1 = table(1, n1, m1), e2 = table(2, n2, m2);

  // Stage 1: sum over k3 -> t1[i0][i1][x2][c]
  std::vector<cplx> t1(static_cast<std::size_t>(n0) * n1 * m2 * 3);
  for_each_slab(static_cast<std::size_t>(n0), [&](std::size_t s) {
    const int i0 = static_cast<int>(s);
    for (int i1 = 0; i1 < n1; ++i1) {
      const std::size_t base = (static_cast<std::size_t>(i0) * n1 + i1);
      cplx* out = t1.data() + base * m2 * 3;
      for (int i2 = 0; i2 < n2; ++i2) {
        const auto col = coeff.col(static_cast<Eigen::Index>(base * n2 + i2));
        if (col.isZero(0.0)) continue;
        const cplx* e = e2.data() + static_cast<std::size_t>(i2) * m2;
        for (int x = 0; x < m2; ++x)
          for (int c = 0; c < 3; ++c) out[3 * x + c] += col[c] * e[x];
      }
    }
  });

  // Stage 2: sum over k2 -> t2[i0][x1][x2][c]
  std::vector<cplx> t2(static_cast<std::size_t>(n0) * m1 * m2 * 3);
  for_each_slab(static_cast<std::size_t>(n0), [&](std::size_t s) {
    const int i0 = static_cast<int>(s);
    for (int i1 = 0; i1 < n1; ++i1) {
      const cplx* in = t1.data() + (static_cast<std::size_t>(i0) * n1 + i1) * m2 * 3;
      for (int x1 = 0; x1 < m1; ++x1) {
        const cplx e = e1[static_cast<std::size_t>(i1) * m1 + x1];
        cplx* out = t2.data() + (static_cast<std::size_t>(i0) * m1 + x1) * m2 * 3;
        for (int q = 0; q < 3 * m2; ++q) out[q] += in[q] * e;
      }
    }
  });

  // Stage 3: sum over k1 -> values[x0][x1][x2]
  PhysicalField f{grid, Eigen::Matrix3Xd::Zero(3, static_cast<Eigen::Index>(grid.point_count()))};
  const double w = lat.cell_volume();
  for_each_slab(static_cast<std::size_t>(m0), [&](std::size_t s) {
    const int x0 = static_cast<int>(s);
    std::vector<cplx> acc(static_cast<std::size_t>(m1) * m2 * 3, cplx(0.0));
    for (int i0 = 0; i0 < n0; ++i0) {
      const cplx e = e0[static_cast<std::size_t>(i0) * m0 + x0];
      const cplx* in = t2.data() + static_cast<std::size_t>(i0) * m1 * m2 * 3;
      for (std::size_t q = 0; q < acc.size(); ++q) acc[q] += in[q] * e;
    }
    for (int x1 = 0; x1 < m1; ++x1)
      for (int x2 = 0; x2 < m2; ++x2) {
        const std::size_t p = f.index(x0, x1, x2);
        const cplx* a = acc.data() + (static_cast<std::size_t>(x1) * m2 + x2) * 3;
        for (int c = 0; c < 3; ++c)
          f.values(c, static_cast<Eigen::Index>(p)) = w * (imaginary ? a[c].imag() : a[c].real());
      }
  });
  return f;
}

Eigen::Matrix3Xd curl_coefficients(const VecField& v) {
  const KLattice& lat = v.lattice();
  Eigen::Matrix3Xd c(3, v.values().cols());
  for (std::size_t n = 0; n < lat.node_count(); ++n)
    c.col(static_cast<Eigen::Index>(n)) = lat.wavevector(n).cross(Vec3(v[n]));
  return c;
}

}  // namespace

PhysicalField reconstruct_velocity(const VecField& v, const XGrid& grid) {
  require_antisymmetric(v);
  return synthesize(v.lattice(), v.values(), grid, true);
}

PhysicalField reconstruct_vorticity(const VecField& v, const XGrid& grid) {
  require_antisymmetric(v);
  return synthesize(v.lattice(), curl_coefficients(v), grid, false);
}

XGrid default_xgrid(const KLattice& lattice, double a, const XGridPolicy& policy) {
  if (!(a > 0.0)) throw DomainError("axial wavenumber must be positive");
  const double half3 = 0.5 * policy.axial_periods * 2.0 * std::numbers::pi / a;
  const int p3 = static_cast<int>(std::lround(policy.axial_periods * policy.points_per_wavelength)) + 1;
  const int nperp = std::max(lattice.half_extent(0), lattice.half_extent(1));
  const int pt = policy.transverse_points > 0 ? policy.transverse_points : std::max(32, 4 * nperp);
  const double halft = std::numbers::pi / lattice.step();
  // Transverse axes: one full open period. Axial: closed box.
  const double dt = 2.0 * halft / pt;
  return XGrid(Vec3(-halft, -halft, -half3), Vec3(halft - dt, halft - dt, half3), {pt, pt, p3}, true);
}

std::vector<double> marginal_enstrophy_k3(const VecField& v) {
  const KLattice& lat = v.lattice();
  const int n2 = lat.extent(2);
  std::vector<double> row(static_cast<std::size_t>(n2), 0.0);
  for (std::size_t n = 0; n < lat.node_count(); ++n)
    row[n % static_cast<std::size_t>(n2)] += lat.wavevector(n).squaredNorm() * v[n].squaredNorm();
  const double w = kTwoPiCubed * lat.step() * lat.step();
  for (double& r : row) r *= w;
  return row;
}

X3Marginal marginal_enstrophy_x3(const VecField& v, const XGrid& grid) {
  const PhysicalField w = reconstruct_vorticity(v, grid);
  const int m0 = grid.points[0], m1 = grid.points[1], m2 = grid.points[2];
  X3Marginal out;
  out.x3.resize(static_cast<std::size_t>(m2));
  out.density.assign(static_cast<std::size_t>(m2), 0.0);
  for (int x2 = 0; x2 < m2; ++x2) out.x3[static_cast<std::size_t>(x2)] = grid.coordinate(2, x2);
  const double da = grid.spacing(0) * grid.spacing(1);
  double top = 0.0, edge = 0.0;
  for (int x0 = 0; x0 < m0; ++x0)
    for (int x1 = 0; x1 < m1; ++x1)
      for (int x2 = 0; x2 < m2; ++x2) {
        const double s = w.values.col(static_cast<Eigen::Index>(w.index(x0, x1, x2))).squaredNorm();
        out.density[static_cast<std::size_t>(x2)] += s * da;
        top = std::max(top, s);
        if (x0 == 0 || x1 == 0 || x0 == m0 - 1 || x1 == m1 - 1) edge = std::max(edge, s);
      }
  // A grid covering a whole transverse period has no physical boundary.
  const double period = 2.0 * std::numbers::pi / v.lattice().step();
  const bool full_period = !grid.closed ||
                           (std::abs(grid.spacing(0) * m0 - period) < 1e-9 * period &&
                            std::abs(grid.spacing(1) * m1 - period) < 1e-9 * period);
  out.decay_warning = !full_period && edge > 1e-6 * top;
  return out;
}

MaxSpeed max_speed(const VecField& v, const XGrid& grid) {
  const PhysicalField u = reconstruct_velocity(v, grid);
  MaxSpeed best;
  if (u.values.cols() == 0) return best;
  Eigen::Index arg = 0;
  best.value = u.values.colwise().norm().maxCoeff(&arg);
  const auto p = static_cast<std::size_t>(arg);
  const int i2 = static_cast<int>(p % grid.points[2]);
  const int i1 = static_cast<int>((p / grid.points[2]) % grid.points[1]);
  const int i0 = static_cast<int>(p / (static_cast<std::size_t>(grid.points[2]) * grid.points[1]));
  best.location = Vec3(grid.coordinate(0, i0), grid.coordinate(1, i1), grid.coordinate(2, i2));
  if (best.value == 0.0) return best;

  Vec3 lo, hi;
  for (int a = 0; a < 3; ++a) {
    const double d = grid.spacing(a);
    lo[a] = best.location[a] - 2.0 * d;
    hi[a] = best.location[a] + 2.0 * d;
  }
  const XGrid fine(lo, hi, {17, 17, 17}, true);
  const PhysicalField uf = reconstruct_velocity(v, fine);
  Eigen::Index farg = 0;
  const double fv = uf.values.colwise().norm().maxCoeff(&farg);
  if (fv > best.value) {
    best.value = fv;
    const auto q = static_cast<std::size_t>(farg);
    best.location = Vec3(fine.coordinate(0, static_cast<int>(q / (17 * 17))),
                         fine.coordinate(1, static_cast<int>((q / 17) % 17)),
                         fine.coordinate(2, static_cast<int>(q % 17)));
  }
  return best;
}

double alignment_cosine(const PhysicalField& u, const PhysicalField& w, AlignmentMode mode) {
  if (u.values.cols() != w.values.cols()) throw DomainError("velocity and vorticity grids differ");
  if (u.values.cols() == 0) return 0.0;
  // The angle is undefined where either field vanishes; points at roundoff
  // level relative to the field maximum are skipped.
  const double cut_u = 1e-10 * u.values.colwise().norm().maxCoeff();
  const double cut_w = 1e-10 * w.values.colwise().norm().maxCoeff();
  double num = 0.0, den = 0.0;
  for (Eigen::Index p = 0; p < u.values.cols(); ++p) {
    const Vec3 a = u.values.col(p), b = w.values.col(p);
    const double na = a.norm(), nb = b.norm();
    if (na <= cut_u || nb <= cut_w || na * nb == 0.0) continue;
    const double weight = 0.5 * na * na;
    const double c = a.dot(b) / (na * nb);
    num += weight * (mode == AlignmentMode::absolute ? std::abs(c) : c);
    den += weight;
  }
  return den > 0.0 ? num / den : 0.0;
}

double alignment_cosine(const VecField& v, const XGrid& grid, AlignmentMode mode) {
  return alignment_cosine(reconstruct_velocity(v, grid), reconstruct_vorticity(v, grid), mode);
}

Peak detect_peak_time(const std::vector<double>& t, const std::vector<double>& y) {
  if (t.size() != y.size() || t.size() < 3) throw DomainError("peak detection needs >= 3 samples");
  const auto it = std::max_element(y.begin(), y.end());
  const auto i = static_cast<std::size_t>(it - y.begin());
  Peak p;
  p.t = t[i];
  p.value = y[i];
  if (i == 0 || i + 1 == y.size()) return p;
  p.interior = true;
  const double x0 = t[i - 1], x1 = t[i], x2 = t[i + 1];
  const double y0 = y[i - 1], y1 = y[i], y2 = y[i + 1];
  // Newton form of the interpolating parabola.
  const double d1 = (y1 - y0) / (x1 - x0);
  const double d2 = (y2 - y1) / (x2 - x1);
  const double c2 = (d2 - d1) / (x2 - x0);
  if (c2 >= 0.0) return p;
  const double c1 = d1 - c2 * (x0 + x1);  // y = c2 x^2 + c1 x + c0
  const double xv = -c1 / (2.0 * c2);
  const double tv = std::clamp(xv, x0, x2);
  p.t = tv;
  p.value = y0 + d1 * (tv - x0) + c2 * (tv - x0) * (tv - x1);
  return p;
}

std::vector<std::size_t> local_maxima(const std::vector<double>& y) {
  std::vector<std::size_t> out;
  const std::size_t n = y.size();
  std::size_t i = 1;
  while (i + 1 < n) {
    if (y[i] > y[i - 1]) {
      std::size_t j = i;
      while (j + 1 < n && y[j + 1] == y[i]) ++j;
      if (j + 1 < n && y[j + 1] < y[i]) out.push_back((i + j) / 2);
      i = j + 1;
    } else {
      ++i;
    }
  }
  return out;
}

}  // namespace nskv
