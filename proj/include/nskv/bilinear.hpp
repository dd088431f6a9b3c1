// The quadratic interaction
//
//   B(v, w)(k) = step^3 sum_{k'} <v(k - k'), k> P_k w(k'),
//
// with fields extended by zero off the lattice. B(v, w)(0) is defined as 0.
#pragma once

#include <complex>
#include <memory>
#include <utility>

#include "nskv/lattice.hpp"

namespace nskv {

/// Exact direct summation over all pairs (k, k') with k - k' on the lattice.
VecField bilinear_direct(const VecField& v, const VecField& w);

/// Zero-padded FFT convolution plan for one lattice.
///
/// Holds FFTW plans and scratch buffers. A plan serves one call at a
/// time; clone it (copy) to use from several threads.
class ConvPlan {
 public:
  explicit ConvPlan(const KLattice& lattice);
  ConvPlan(const ConvPlan& other);
  ConvPlan& operator=(const ConvPlan& other);
  ConvPlan(ConvPlan&&) noexcept;
  ConvPlan& operator=(ConvPlan&&) noexcept;
  ~ConvPlan();

  const KLattice& lattice() const;
  /// Padded transform length per axis.
  const Index3& padded() const;

  /// Same value contract as bilinear_direct.
  VecField apply(const VecField& v, const VecField& w);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Free-function spelling of ConvPlan::apply.
inline VecField bilinear_fast(const VecField& v, const VecField& w, ConvPlan& plan) {
  return plan.apply(v, w);
}

/// Smallest length >= n whose only prime factors are 2, 3, 5 and 7.
int fft_friendly_length(int n);

struct SupportRadius {
  double perpendicular = 0.0;  ///< max(|k1|, |k2|) over the support
  double axial = 0.0;          ///< max |k3| over the support
};

/// Half-extents of the set of nodes with |f(k)| >= threshold * sup|f|.
SupportRadius support_radius(const VecField& f, double threshold);

}  // namespace nskv
