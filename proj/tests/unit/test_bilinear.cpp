#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "nskv/bilinear.hpp"
#include "nskv/error.hpp"
#include "nskv/seed.hpp"
#include "support.hpp"

using namespace nskv;
using nskv::test::pair_field;
using nskv::test::random_field;
using nskv::test::rel;

namespace {

// Plain six-fold loop over (k, k'), independent of the production kernels.
VecField brute_force(const VecField& v, const VecField& w) {
  const KLattice& lat = v.lattice();
  const Index3 h = lat.half_extents();
  const double d = lat.step();
  VecField out(lat);
  for (int a = -h[0]; a <= h[0]; ++a)
    for (int b = -h[1]; b <= h[1]; ++b)
      for (int c = -h[2]; c <= h[2]; ++c) {
        const Vec3 k(a * d, b * d, c * d);
        if (k.squaredNorm() == 0.0) continue;
        Vec3 acc = Vec3::Zero();
        for (int p = -h[0]; p <= h[0]; ++p)
          for (int q = -h[1]; q <= h[1]; ++q)
            for (int r = -h[2]; r <= h[2]; ++r) {
              const Index3 diff{a - p, b - q, c - r};
              if (!lat.contains(diff)) continue;
              acc += v[lat.index(diff)].dot(k) * w[lat.index({p, q, r})];
            }
        acc = acc - (acc.dot(k) / k.squaredNorm()) * k;
        out[lat.index({a, b, c})] = d * d * d * acc;
      }
  return out;
}

VecField two_lobe_random(const KLattice& lat, std::uint64_t seed) {
  VecField f = random_field(lat, seed);
  for (std::size_t n = 0; n < lat.node_count(); ++n) {
    const Vec3 k = lat.wavevector(n);
    const double r = std::min((k - Vec3(0, 0, 2)).norm(), (k + Vec3(0, 0, 2)).norm());
    f[n] *= std::exp(-0.5 * r * r);
  }
  return project_solenoidal(antisymmetrize(f));
}

}  // namespace

TEST_CASE("bilinear vanishes on zero inputs") {
  const KLattice lat(1.0, {2, 2, 3});
  const VecField v = random_field(lat, 1);
  ConvPlan plan(lat);
  CHECK(bilinear_direct(VecField(lat), v).values().norm() == 0.0);
  CHECK(bilinear_direct(v, VecField(lat)).values().norm() == 0.0);
  CHECK(plan.apply(VecField(lat), v).values().norm() == 0.0);
  CHECK(plan.apply(v, VecField(lat)).values().norm() == 0.0);
}

TEST_CASE("single transverse pair does not interact") {
  const KLattice lat(1.0, {2, 2, 8});
  const VecField v = pair_field(lat, {0, 0, 3}, Vec3(1, 0, 0));
  ConvPlan plan(lat);
  CHECK(bilinear_direct(v, v).values().norm() == 0.0);
  CHECK(plan.apply(v, v).values().norm() < 1e-14);
}

TEST_CASE("direct summation matches a brute-force oracle") {
  for (double step : {1.0, 0.5}) {
    const KLattice lat(step, {4, 4, 4});
    const VecField v = two_lobe_random(lat, 21);
    const VecField w = two_lobe_random(lat, 22);
    const VecField ref = brute_force(v, w);
    CHECK(rel(bilinear_direct(v, w), ref) <= 1e-12);
    CHECK(rel(bilinear_direct(v, v), brute_force(v, v)) <= 1e-12);
  }
}

TEST_CASE("fft path matches direct summation") {
  for (Index3 h : {Index3{4, 4, 4}, Index3{1, 2, 3}, Index3{3, 3, 8}, Index3{4, 4, 8}}) {
    const KLattice lat(0.75, h);
    ConvPlan plan(lat);
    for (std::uint64_t s = 0; s < 4; ++s) {
      const VecField v = random_field(lat, 100 + s);
      const VecField w = random_field(lat, 200 + s);
      CHECK(rel(plan.apply(v, w), bilinear_direct(v, w)) <= 1e-10);
      CHECK(rel(plan.apply(v, v), bilinear_direct(v, v)) <= 1e-10);
    }
  }
}

TEST_CASE("output of antisymmetric inputs is antisymmetric and solenoidal") {
  const KLattice lat(1.0, {3, 3, 6});
  const VecField v = random_field(lat, 5, true);
  ConvPlan plan(lat);
  const VecField b = plan.apply(v, v);
  CHECK(b.antisymmetric());
  CHECK(b.solenoidal());
  VecField even = b;
  for (std::size_t n = 0; n < lat.node_count(); ++n) even[n] = b[n] + b[lat.mirror(n)];
  CHECK(even.values().norm() <= 1e-12 * b.values().norm());
  CHECK(divergence_max(b) <= 1e-12);
}

TEST_CASE("plan copies are independent and reject other lattices") {
  const KLattice lat(1.0, {2, 2, 4});
  ConvPlan plan(lat);
  ConvPlan copy = plan;
  const VecField v = random_field(lat, 8);
  CHECK(rel(copy.apply(v, v), plan.apply(v, v)) == 0.0);
  const VecField other = random_field(KLattice(1.0, {2, 2, 5}), 9);
  CHECK_THROWS_AS(plan.apply(other, other), DomainError);
  CHECK_THROWS_AS(bilinear_direct(v, other), DomainError);
}

TEST_CASE("fft friendly length") {
  CHECK(fft_friendly_length(1) == 1);
  CHECK(fft_friendly_length(11) == 12);
  CHECK(fft_friendly_length(13) == 14);
  CHECK(fft_friendly_length(97) == 98);
  CHECK(fft_friendly_length(64) == 64);
}

TEST_CASE("support radius") {
  const KLattice lat(1.0, {2, 2, 8});
  const SupportRadius r = support_radius(pair_field(lat, {0, 0, 5}, Vec3(1, 0, 0)), 1e-3);
  CHECK(r.perpendicular == 0.0);
  CHECK(r.axial == 5.0);
  FlowConfig c = nskv::test::small_flow(1.0);
  const SupportRadius s = support_radius(build_antisym_seed(c), 1e-3);
  CHECK(s.axial >= c.a - c.b);
  CHECK(s.axial <= c.a + c.b);
  CHECK_THROWS_AS(support_radius(VecField(lat), 0.0), DomainError);
}
