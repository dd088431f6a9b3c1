#pragma once

#include <random>

#include "nskv/lattice.hpp"
#include "nskv/seed.hpp"

namespace nskv::test {

inline VecField random_field(const KLattice& lat, std::uint64_t seed, bool antisym = false) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  VecField f(lat);
  for (std::size_t n = 0; n < lat.node_count(); ++n) f[n] = Vec3(nd(rng), nd(rng), nd(rng));
  if (antisym) f = antisymmetrize(f);
  return f;
}

// v(+k0) = value, v(-k0) = -value.
inline VecField pair_field(const KLattice& lat, const Index3& j, const Vec3& value) {
  VecField f(lat);
  f[lat.index(j)] = value;
  f[lat.index({-j[0], -j[1], -j[2]})] = -value;
  f.flags() = {true, true};
  return f;
}

inline FlowConfig small_flow(double amplitude = 1.0) {
  FlowConfig c;
  c.a = 3.0;
  c.b = 1.5;
  c.eps = 0.5;
  c.amplitude = amplitude;
  c.half_extents = {6, 6, 8};
  return c;
}

inline double rel(const VecField& a, const VecField& b) {
  return (a.values() - b.values()).norm() / b.values().norm();
}

}  // namespace nskv::test
