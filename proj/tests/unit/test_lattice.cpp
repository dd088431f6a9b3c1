#include <doctest.h>

#include <cmath>

#include "nskv/error.hpp"
#include "nskv/lattice.hpp"
#include "nskv/seed.hpp"
#include "support.hpp"

using namespace nskv;
using nskv::test::pair_field;
using nskv::test::random_field;

TEST_CASE("projector on single vectors") {
  CHECK((project_solenoidal(Vec3(0, 0, 1), Vec3(0, 0, 5)) - Vec3::Zero()).norm() == 0.0);
  CHECK((project_solenoidal(Vec3(0, 0, 1), Vec3(1, 0, 0)) - Vec3(1, 0, 0)).norm() == 0.0);
  CHECK((project_solenoidal(Vec3(1, 1, 0), Vec3(1, 0, 0)) - Vec3(0.5, -0.5, 0)).norm() < 1e-15);
  CHECK_THROWS_AS(project_solenoidal(Vec3::Zero(), Vec3(1, 0, 0)), DomainError);
}

TEST_CASE("projector is idempotent and orthogonal") {
  const KLattice lat(0.5, {3, 4, 5});
  const VecField f = random_field(lat, 7);
  const VecField p = project_solenoidal(f);
  const VecField pp = project_solenoidal(p);
  CHECK((p.values() - pp.values()).norm() <= 1e-13 * p.values().norm());
  CHECK(divergence_max(p) <= 1e-13);
  CHECK(p[lat.origin()].norm() == 0.0);
  // residual f - Pf is parallel to k
  for (std::size_t n = 0; n < lat.node_count(); ++n) {
    if (n == lat.origin()) continue;
    const Vec3 k = lat.wavevector(n);
    CHECK((f[n] - p[n]).cross(k).norm() <= 1e-12 * (1.0 + f[n].norm() * k.norm()));
  }
}

TEST_CASE("antisymmetrize") {
  const KLattice lat(1.0, {2, 2, 3});
  const VecField odd = random_field(lat, 3, true);
  CHECK((antisymmetrize(odd).values() - odd.values()).norm() <= 1e-15);
  CHECK(antisymmetry_defect(odd) == 0.0);

  VecField even(lat);
  const VecField r = random_field(lat, 4);
  for (std::size_t n = 0; n < lat.node_count(); ++n) even[n] = r[n] + r[lat.mirror(n)];
  CHECK(antisymmetrize(even).values().norm() == 0.0);

  VecField one(lat);
  one[lat.index({1, 0, 2})] = Vec3(1, 0, 0);
  const VecField w = antisymmetrize(one);
  CHECK((w[lat.index({1, 0, 2})] - Vec3(0.5, 0, 0)).norm() == 0.0);
  CHECK((w[lat.index({-1, 0, -2})] - Vec3(-0.5, 0, 0)).norm() == 0.0);
  CHECK(w.antisymmetric());
}

TEST_CASE("mirror node is -k") {
  const KLattice lat(0.25, {2, 3, 4});
  for (std::size_t n = 0; n < lat.node_count(); ++n)
    CHECK((lat.wavevector(n) + lat.wavevector(lat.mirror(n))).norm() == 0.0);
}

TEST_CASE("divergence_max") {
  const KLattice lat(1.0, {2, 2, 3});
  CHECK(divergence_max(VecField(lat)) == 0.0);
  VecField f(lat);
  f[lat.index({0, 0, 2})] = Vec3(0, 0, 2);
  CHECK(divergence_max(f) == doctest::Approx(1.0).epsilon(1e-15));
  FlowConfig c = nskv::test::small_flow(7.0);
  CHECK(divergence_max(build_antisym_seed(c)) <= 1e-12);
}

TEST_CASE("parseval energy and enstrophy") {
  const KLattice lat(1.0, {1, 1, 4});
  CHECK(parseval_energy(VecField(lat)) == 0.0);
  CHECK(parseval_enstrophy(VecField(lat)) == 0.0);
  const VecField pair = pair_field(lat, {0, 0, 3}, Vec3(1, 0, 0));
  CHECK(parseval_energy(pair) == doctest::Approx(kTwoPiCubed).epsilon(1e-15));
  CHECK(parseval_enstrophy(pair) == doctest::Approx(2 * 9 * kTwoPiCubed).epsilon(1e-15));
  CHECK(kTwoPiCubed == doctest::Approx(std::pow(2 * M_PI, 3)).epsilon(1e-15));

  const VecField f = project_solenoidal(random_field(lat, 9));
  // |k| >= step on every nonzero node
  CHECK(parseval_enstrophy(f) >= 2.0 * parseval_energy(f) * (1 - 1e-14));
}

TEST_CASE("lattice rescale map") {
  const KLattice lat(0.5, {4, 4, 8});
  const VecField f = random_field(lat, 11);
  const VecField same = lattice_rescale_map(f, 1);
  CHECK((same.values() - f.values()).norm() == 0.0);

  VecField one(lat);
  one[lat.index({0, 0, 2})] = Vec3(1, 0, 0);
  const VecField w = lattice_rescale_map(one, 2);
  CHECK(w.lattice().half_extents() == Index3{2, 2, 4});
  CHECK((w[w.lattice().index({0, 0, 1})] - Vec3(4, 0, 0)).norm() == 0.0);
  CHECK(w.values().norm() == 4.0);

  FlowConfig c;
  c.a = 3.0;
  c.b = 1.5;
  c.eps = 1.0;
  c.amplitude = 1.0;
  c.step = 0.125;
  c.half_extents = {48, 48, 40};
  const VecField seed = build_antisym_seed(c);
  const VecField r = lattice_rescale_map(seed, 2);
  CHECK(parseval_energy(r) == doctest::Approx(2.0 * parseval_energy(seed)).epsilon(1e-3));
}
