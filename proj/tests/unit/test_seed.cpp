#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "nskv/error.hpp"
#include "nskv/seed.hpp"
#include "support.hpp"

using namespace nskv;

namespace {

// Independent evaluation of the seed energy integral by a midpoint-free
// Riemann sum on a lattice of step h; matches the lattice value when h = 1.
double seed_energy_quadrature(double a, double b, double eps, double h, bool two_lobes) {
  auto g = [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); };
  auto chi = [&](double x) {
    const double ax = std::abs(x);
    if (ax >= b) return 0.0;
    const double u = std::clamp((ax - (b - eps)) / eps, 0.0, 1.0);
    return 1.0 - u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
  };
  const int m = static_cast<int>(std::ceil(10.0 / h));
  const int m3 = static_cast<int>(std::ceil((a + b) / h));
  double sum = 0.0;
  for (int i = -m; i <= m; ++i)
    for (int j = -m; j <= m; ++j)
      for (int l = -m3; l <= m3; ++l) {
        const double k1 = i * h, k2 = j * h, k3 = l * h;
        if (k3 == 0.0) continue;
        double lobe = g(k3 - a) * chi(k3 - a);
        if (two_lobes) lobe += g(k3 + a) * chi(k3 + a);
        const double q = k1 * k1 + k2 * k2;
        const double amp = g(k1) * g(k2) * lobe;
        sum += (q + q * q / (k3 * k3)) * amp * amp;
      }
  return 0.5 * kTwoPiCubed * h * h * h * sum;
}

}  // namespace

TEST_CASE("gaussian density") {
  CHECK(gaussian_density(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-15));
  for (double x : {0.3, 1.0, 2.5, 7.0}) CHECK(gaussian_density(-x) == gaussian_density(x));
  double s = 0.0;
  for (int i = -8; i <= 8; ++i) s += gaussian_density(i);
  CHECK(s == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("cutoff") {
  CHECK(cutoff_chi(0.0, 15.0, 1.0) == 1.0);
  CHECK(cutoff_chi(15.0, 15.0, 1.0) == 0.0);
  CHECK(cutoff_chi(-15.0, 15.0, 1.0) == 0.0);
  CHECK(cutoff_chi(14.5, 15.0, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(cutoff_chi(-14.5, 15.0, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(cutoff_chi(14.0, 15.0, 1.0) == 1.0);
}

TEST_CASE("complex seed closed form") {
  FlowConfig c;
  c.a = 30.0;
  c.b = 15.0;
  c.eps = 1.0;
  c.amplitude = 1.0;
  c.half_extents = {6, 6, 45};
  const VecField f = build_complex_seed(c);
  const KLattice& lat = f.lattice();
  CHECK(f[lat.index({0, 0, 30})].norm() == 0.0);
  // g(1) g(0) g(0) = exp(-1/2) / (2 pi)^(3/2)
  const Vec3 v = f[lat.index({1, 0, 30})];
  CHECK(v[0] == doctest::Approx(0.038510836890748947).epsilon(1e-14));
  CHECK(v[1] == 0.0);
  CHECK(v[2] == doctest::Approx(-0.038510836890748947 / 30.0).epsilon(1e-14));
  CHECK(divergence_max(f) <= 1e-14);
  CHECK(!f.antisymmetric());
}

TEST_CASE("antisymmetric seed") {
  const FlowConfig c = nskv::test::small_flow(2.0);
  const VecField f = build_antisym_seed(c);
  const KLattice& lat = f.lattice();
  CHECK(f.antisymmetric());
  CHECK(antisymmetry_defect(f) == 0.0);
  for (std::size_t n = 0; n < lat.node_count(); ++n) CHECK((f[n] + f[lat.mirror(n)]).norm() == 0.0);
  CHECK(f[lat.index({0, 0, 3})].norm() == 0.0);
  CHECK(f[lat.index({0, 0, -3})].norm() == 0.0);
  CHECK(divergence_max(f) <= 1e-12);
}

TEST_CASE("energy calibration") {
  const FlowConfig c = nskv::test::small_flow(1.0);
  const VecField f = build_antisym_seed(c);
  const double e = parseval_energy(f);
  Calibrated same = calibrate_amplitude(f, e);
  CHECK(same.amplitude == doctest::Approx(1.0).epsilon(1e-15));
  Calibrated twice = calibrate_amplitude(f, 4.0 * e);
  CHECK(twice.amplitude == doctest::Approx(2.0).epsilon(1e-15));

  FlowConfig target = c;
  target.amplitude.reset();
  target.target_energy = 1234.5;
  const Calibrated cal = build_seed(SeedKind::antisymmetric, target);
  CHECK(parseval_energy(cal.field) == doctest::Approx(1234.5).epsilon(1e-12));
  const double oracle = seed_energy_quadrature(c.a, c.b, c.eps, 1.0, true);
  CHECK(cal.amplitude == doctest::Approx(std::sqrt(1234.5 / oracle)).epsilon(1e-6));
}

TEST_CASE("flow config validation") {
  FlowConfig c = nskv::test::small_flow(1.0);
  CHECK_NOTHROW(c.validate());
  FlowConfig bad = c;
  bad.b = 4.0;  // b > a
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.eps = 2.0;  // eps > b
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.half_extents = {4, 4, 3};  // lobe not on the lattice
  CHECK_THROWS_AS(build_antisym_seed(bad), ConfigError);
  bad = c;
  bad.target_energy = 10.0;  // amplitude and energy both set
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}
