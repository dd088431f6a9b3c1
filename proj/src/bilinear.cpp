#include "nskv/bilinear.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <vector>

#include "nskv/error.hpp"
#include "nskv/parallel.hpp"

namespace nskv {

namespace {

void require_same(const VecField& v, const VecField& w) {
  if (!(v.lattice() == w.lattice())) throw DomainError("bilinear term needs fields on the same lattice");
}

// Q_l(k) = sum_j k_j C_jl(k)  ->  out(k) = step^3 P_k Q(k), 0 at k = 0.
// conv(n, j, l) returns C_jl at node n.
template <class Conv>
VecField assemble(const KLattice& lat, Conv&& conv, bool antisymmetric) {
  Eigen::Matrix3Xd out(3, static_cast<Eigen::Index>(lat.node_count()));
  const double w = lat.cell_volume();
  const std::size_t plane = lat.plane_size();
  for_each_slab(static_cast<std::size_t>(lat.extent(0)), [&](std::size_t s) {
    for (std::size_t n = s * plane; n < (s + 1) * plane; ++n) {
      const Vec3 k = lat.wavevector(n);
      const double k2 = k.squaredNorm();
      if (k2 == 0.0) {
        out.col(static_cast<Eigen::Index>(n)).setZero();
        continue;
      }
      Vec3 q = Vec3::Zero();
      for (int j = 0; j < 3; ++j)
        for (int l = 0; l < 3; ++l) q[l] += k[j] * conv(n, j, l);
      out.col(static_cast<Eigen::Index>(n)) = w * (q - (q.dot(k) / k2) * k);
    }
  });
  return VecField(lat, std::move(out), {antisymmetric, true});
}

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// Direct summation

VecField bilinear_direct(const VecField& v, const VecField& w) {
  require_same(v, w);
  const KLattice& lat = v.lattice();
  const std::size_t count = lat.node_count();
  const int n0 = lat.extent(0), n1 = lat.extent(1), n2 = lat.extent(2);
  const int h0 = lat.half_extent(0), h1 = lat.half_extent(1), h2 = lat.half_extent(2);

  // Component arrays; vr holds v(-q) so that v(k - k') = vr(k' - k) runs
  // forward with k'.
  std::array<std::vector<double>, 3> vr, wc;
  for (int c = 0; c < 3; ++c) {
    vr[c].resize(count);
    wc[c].resize(count);
    for (std::size_t n = 0; n < count; ++n) {
      vr[c][n] = v.values()(c, static_cast<Eigen::Index>(lat.mirror(n)));
      wc[c][n] = w.values()(c, static_cast<Eigen::Index>(n));
    }
  }

  // C(n, 3 j + l) = sum_{k'} v_j(k - k') w_l(k')
  std::vector<double> conv(9 * count, 0.0);
  for_each_slab(static_cast<std::size_t>(n0), [&](std::size_t slab) {
    const int o0 = static_cast<int>(slab);
    for (int p0 = std::max(0, o0 - h0); p0 <= std::min(n0 - 1, o0 + h0); ++p0) {
      const int r0 = p0 - o0 + h0;
      for (int o1 = 0; o1 < n1; ++o1) {
        for (int p1 = std::max(0, o1 - h1); p1 <= std::min(n1 - 1, o1 + h1); ++p1) {
          const int r1 = p1 - o1 + h1;
          const std::size_t bw = (static_cast<std::size_t>(p0) * n1 + p1) * n2;
          const std::size_t br = (static_cast<std::size_t>(r0) * n1 + r1) * n2;
          const double* w0 = wc[0].data() + bw;
          const double* w1 = wc[1].data() + bw;
          const double* w2 = wc[2].data() + bw;
          double* out = conv.data() + 9 * ((static_cast<std::size_t>(o0) * n1 + o1) * n2);
          for (int o2 = 0; o2 < n2; ++o2) {
            const int lo = std::max(0, o2 - h2), hi = std::min(n2 - 1, o2 + h2);
            const std::size_t shift = br + h2 - o2;
            const double* a0 = vr[0].data() + shift;
            const double* a1 = vr[1].data() + shift;
            const double* a2 = vr[2].data() + shift;
            double c00 = 0, c01 = 0, c02 = 0, c10 = 0, c11 = 0, c12 = 0, c20 = 0, c21 = 0, c22 = 0;
            for (int p2 = lo; p2 <= hi; ++p2) {
              const double x0 = a0[p2], x1 = a1[p2], x2 = a2[p2];
              const double y0 = w0[p2], y1 = w1[p2], y2 = w2[p2];
              c00 += x0 * y0; c01 += x0 * y1; c02 += x0 * y2;
              c10 += x1 * y0; c11 += x1 * y1; c12 += x1 * y2;
              c20 += x2 * y0; c21 += x2 * y1; c22 += x2 * y2;
            }
            double* c = out + 9 * o2;
            c[0] += c00; c[1] += c01; c[2] += c02;
            c[3] += c10; c[4] += c11; c[5] += c12;
            c[6] += c20; c[7] += c21; c[8] += c22;
          }
        }
      }
    }
  });

  return assemble(
      lat, [&](std::size_t n, int j, int l) { return conv[9 * n + 3 * j + l]; },
      v.antisymmetric() && w.antisymmetric());
}

// ---------------------------------------------------------------------------
// FFT path

int fft_friendly_length(int n) {
  for (int m = std::max(1, n);; ++m) {
    int r = m;
    for (int p : {2, 3, 5, 7})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

struct ConvPlan::Impl {
  KLattice lattice;
  Index3 padded{};
  std::size_t real_size = 0;
  std::size_t spec_size = 0;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  double* real = nullptr;
  std::array<fftw_complex*, 6> spectra{};
  fftw_complex* product = nullptr;

  explicit Impl(const KLattice& lat) : lattice(lat) {
    // Linear convolution support is [-2N, 2N]; outputs are read on [-N, N],
    // so any length >= 3N + 1 keeps wrapped contributions off the lattice.
    for (int a = 0; a < 3; ++a) padded[a] = fft_friendly_length(3 * lat.half_extent(a) + 1);
    real_size = static_cast<std::size_t>(padded[0]) * padded[1] * padded[2];
    spec_size = static_cast<std::size_t>(padded[0]) * padded[1] * (padded[2] / 2 + 1);
    std::lock_guard<std::mutex> lock(planner_mutex());
    real = fftw_alloc_real(real_size);
    product = fftw_alloc_complex(spec_size);
    for (auto& s : spectra) s = fftw_alloc_complex(spec_size);
    if (!real || !product) throw std::bad_alloc();
    for (auto* s : spectra)
      if (!s) throw std::bad_alloc();
    forward = fftw_plan_dft_r2c_3d(padded[0], padded[1], padded[2], real, product, FFTW_ESTIMATE);
    backward = fftw_plan_dft_c2r_3d(padded[0], padded[1], padded[2], product, real,
                                    FFTW_ESTIMATE | FFTW_DESTROY_INPUT);
  }

  ~Impl() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
    fftw_free(real);
    fftw_free(product);
    for (auto* s : spectra) fftw_free(s);
  }

  Impl(const Impl&) = delete;
  Impl& operator=(const Impl&) = delete;

  void transform(const VecField& f, int component, fftw_complex* out) {
    std::fill(real, real + real_size, 0.0);
    const KLattice& lat = lattice;
    const int n0 = lat.extent(0), n1 = lat.extent(1), n2 = lat.extent(2);
    const auto& vals = f.values();
    std::size_t n = 0;
    for (int i0 = 0; i0 < n0; ++i0)
      for (int i1 = 0; i1 < n1; ++i1) {
        double* row = real + (static_cast<std::size_t>(i0) * padded[1] + i1) * padded[2];
        for (int i2 = 0; i2 < n2; ++i2, ++n) row[i2] = vals(component, static_cast<Eigen::Index>(n));
      }
    fftw_execute_dft_r2c(forward, real, out);
  }

  VecField apply(const VecField& v, const VecField& w) {
    if (!(v.lattice() == lattice) || !(w.lattice() == lattice))
      throw DomainError("convolution plan was built for a different lattice");
    const bool same = &v == &w || v.values().data() == w.values().data();
    for (int c = 0; c < 3; ++c) transform(v, c, spectra[c]);
    if (!same)
      for (int c = 0; c < 3; ++c) transform(w, c, spectra[3 + c]);

    const KLattice& lat = lattice;
    const std::size_t count = lat.node_count();
    const int n0 = lat.extent(0), n1 = lat.extent(1), n2 = lat.extent(2);
    const int h0 = lat.half_extent(0), h1 = lat.half_extent(1), h2 = lat.half_extent(2);
    const double scale = 1.0 / static_cast<double>(real_size);

    std::vector<double> conv(9 * count);
    for (int j = 0; j < 3; ++j) {
      for (int l = 0; l < 3; ++l) {
        if (same && l < j) {
          // C_jl = C_lj when both factors are the same field.
          for (std::size_t n = 0; n < count; ++n) conv[9 * n + 3 * j + l] = conv[9 * n + 3 * l + j];
          continue;
        }
        const fftw_complex* a = spectra[j];
        const fftw_complex* b = spectra[same ? l : 3 + l];
        for (std::size_t i = 0; i < spec_size; ++i) {
          product[i][0] = a[i][0] * b[i][0] - a[i][1] * b[i][1];
          product[i][1] = a[i][0] * b[i][1] + a[i][1] * b[i][0];
        }
        fftw_execute_dft_c2r(backward, product, real);
        std::size_t n = 0;
        for (int i0 = 0; i0 < n0; ++i0)
          for (int i1 = 0; i1 < n1; ++i1) {
            const double* row =
                real + (static_cast<std::size_t>(i0 + h0) * padded[1] + (i1 + h1)) * padded[2] + h2;
            for (int i2 = 0; i2 < n2; ++i2, ++n) conv[9 * n + 3 * j + l] = scale * row[i2];
          }
      }
    }
    return assemble(
        lat, [&](std::size_t n, int j, int l) { return conv[9 * n + 3 * j + l]; },
        v.antisymmetric() && w.antisymmetric());
  }
};

ConvPlan::ConvPlan(const KLattice& lattice) : impl_(std::make_unique<Impl>(lattice)) {}
ConvPlan::ConvPlan(const ConvPlan& other) : impl_(std::make_unique<Impl>(other.impl_->lattice)) {}
ConvPlan& ConvPlan::operator=(const ConvPlan& other) {
  if (this != &other) impl_ = std::make_unique<Impl>(other.impl_->lattice);
  return *this;
}
ConvPlan::ConvPlan(ConvPlan&&) noexcept = default;
ConvPlan& ConvPlan::operator=(ConvPlan&&) noexcept = default;
ConvPlan::~ConvPlan() = default;

const KLattice& ConvPlan::lattice() const { return impl_->lattice; }
const Index3& ConvPlan::padded() const { return impl_->padded; }
VecField ConvPlan::apply(const VecField& v, const VecField& w) { return impl_->apply(v, w); }

// ---------------------------------------------------------------------------

SupportRadius support_radius(const VecField& f, double threshold) {
  if (!(threshold > 0.0)) throw DomainError("support threshold must be positive");
  const double top = f.sup_norm();
  SupportRadius r;
  if (top == 0.0) return r;
  const double cut = threshold * top;
  const KLattice& lat = f.lattice();
  for (std::size_t n = 0; n < lat.node_count(); ++n) {
    if (f[n].norm() < cut) continue;
    const Vec3 k = lat.wavevector(n);
    r.perpendicular = std::max({r.perpendicular, std::abs(k.x()), std::abs(k.y())});
    r.axial = std::max(r.axial, std::abs(k.z()));
  }
  return r;
}

}  // namespace nskv
