#include <doctest.h>

#include <cmath>

#include "nskv/error.hpp"
#include "nskv/evolution.hpp"
#include "nskv/series.hpp"
#include "support.hpp"

using namespace nskv;
using nskv::test::pair_field;
using nskv::test::rel;
using nskv::test::small_flow;

namespace {

VecField unit_complex_seed(int n3 = 16) {
  FlowConfig c = small_flow(1.0);
  c.half_extents = {6, 6, n3};
  return build_complex_seed(c);
}

}  // namespace

TEST_CASE("second-order term is the convolution of heat-evolved seeds") {
  const VecField v0 = unit_complex_seed();
  const TimeGrid tg{0.05, 9};
  const GpTable t = compute_gp_table(v0, 3, tg);
  for (int i = 0; i < tg.points; ++i) {
    const VecField g1 = heat_step(v0, tg.at(i));
    CHECK(rel(t.term(1, i), g1) <= 1e-15);
    CHECK(rel(t.term(2, i), bilinear_direct(g1, g1)) <= 1e-12);
  }
}

TEST_CASE("non-interacting seed has no higher terms") {
  const KLattice lat(1.0, {2, 2, 8});
  const VecField v0 = pair_field(lat, {0, 0, 3}, Vec3(1, 0, 0));
  const GpTable t = compute_gp_table(v0, 4, TimeGrid{0.1, 5});
  for (int p = 2; p <= 4; ++p)
    for (int i = 0; i < 5; ++i) CHECK(t.term(p, i).sup_norm() <= 1e-15);
  const LambdaEstimate est = estimate_lambda(t, 4);
  CHECK(!est.working.has_value());
  CHECK(!est.ratios[0].has_value());
}

TEST_CASE("partial sums") {
  const VecField v0 = unit_complex_seed();
  const TimeGrid tg{0.02, 33};
  const GpTable t = compute_gp_table(v0, 6, tg);

  const double A = 3.0;
  VecField lin = heat_step(v0, tg.s_max);
  lin *= A;
  CHECK(rel(series_partial_sum(t, A, tg.s_max, 1), lin) <= 1e-15);

  // leading order is linear in A
  const double d1 = (series_partial_sum(t, 2 * A, tg.s_max, 6) - 2.0 * series_partial_sum(t, A, tg.s_max, 6))
                        .values()
                        .norm();
  const double d2 = (series_partial_sum(t, A, tg.s_max, 6) - 2.0 * series_partial_sum(t, A / 2, tg.s_max, 6))
                        .values()
                        .norm();
  CHECK(d1 / d2 == doctest::Approx(4.0).epsilon(0.1));

  VecField a0 = v0;
  a0 *= A;
  ConvPlan plan(v0.lattice());
  const PicardResult pic = picard_solve(a0, tg.s_max, tg.points - 1, 1e-15, plan);
  CHECK(rel(series_partial_sum(t, A, tg.s_max, 6), pic.v) <= 1e-5);
  const VecField etd = etd_rk2_march(a0, tg.s_max, 512, plan);
  CHECK(rel(series_partial_sum(t, A, tg.s_max, 6), etd) <= 1e-5);

  // off-grid time
  const double tm = 0.5 * (tg.at(10) + tg.at(11));
  const PicardResult half = picard_solve(a0, tm, 64, 1e-15, plan);
  CHECK(rel(series_partial_sum(t, A, tm, 6), half.v) <= 1e-4);
}

TEST_CASE("memory budget") {
  const VecField v0 = unit_complex_seed();
  CHECK_THROWS_AS(compute_gp_table(v0, 6, TimeGrid{0.1, 64}, 1024), BudgetError);
  CHECK(GpTable::memory_estimate(v0.lattice(), 6, 64) > 1024);
}

TEST_CASE("rescaled profiles") {
  const VecField v0 = unit_complex_seed(24);
  const Vec3 k0(0, 0, 3);
  const RescaledProfile p1 = rescale_field(v0, 1, k0);
  // p = 1 reads the seed around its lobe center
  double mass = 0.0, inside = 0.0;
  for (std::size_t i = 0; i < p1.y.size(); ++i) {
    const Vec3 k = k0 + p1.y[i];
    const KLattice& lat = v0.lattice();
    const Index3 j{int(std::lround(k.x())), int(std::lround(k.y())), int(std::lround(k.z()))};
    CHECK((p1.value[i] - v0[lat.index(j)]).norm() <= 1e-15);
    inside += p1.value[i].squaredNorm();
  }
  for (std::size_t n = 0; n < v0.lattice().node_count(); ++n) mass += v0[n].squaredNorm();
  CHECK(inside >= 0.99 * mass);

  const GpTable t = compute_gp_table(v0, 4, TimeGrid{0.01, 5});
  const RescaledProfile p2 = rescale_gp(t, 2, 4, k0);
  CHECK(p2.order == 2);
  CHECK(p2.spacing == doctest::Approx(1.0 / std::sqrt(2.0)));
  double axial_prev = 1e300;
  for (int p = 2; p <= 4; ++p) {
    const FixedPointFit f = fit_fixed_point(rescale_gp(t, p, 4, k0));
    CHECK(std::isfinite(f.c_hat));
    CHECK(f.axial_residual < axial_prev);
    axial_prev = f.axial_residual;
  }
}

TEST_CASE("fixed point fit on synthetic profiles") {
  RescaledProfile prof;
  prof.order = 4;
  prof.spacing = 0.25;
  prof.half_points = 12;
  double planar = 0.0, axial = 0.0;
  for (int a = -12; a <= 12; ++a)
    for (int b = -12; b <= 12; ++b)
      for (int c = -12; c <= 12; ++c) {
        const Vec3 y = 0.25 * Vec3(a, b, c);
        const double G = gaussian_density(y.x()) * gaussian_density(y.y()) * gaussian_density(y.z());
        prof.y.push_back(y);
        prof.value.push_back(2.0 * G * Vec3(y.x(), y.y(), 0.0));
        planar += 4.0 * G * G * (y.x() * y.x() + y.y() * y.y());
        axial += 0.01 * G * G;
      }
  FixedPointFit f = fit_fixed_point(prof);
  CHECK(f.c_hat == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(f.axial_residual == 0.0);

  for (std::size_t i = 0; i < prof.y.size(); ++i) {
    const Vec3& y = prof.y[i];
    prof.value[i].z() = 0.1 * gaussian_density(y.x()) * gaussian_density(y.y()) * gaussian_density(y.z());
  }
  f = fit_fixed_point(prof);
  CHECK(f.c_hat == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(f.axial_residual == doctest::Approx(std::sqrt(axial / planar)).epsilon(1e-12));

  for (auto& v : prof.value) v.setZero();
  CHECK_THROWS_AS(fit_fixed_point(prof), DomainError);
}

TEST_CASE("growth factor from norms") {
  std::vector<double> norms;
  for (int p = 1; p <= 6; ++p) norms.push_back(std::pow(2.0, p) * p * 0.7);
  const LambdaEstimate est = lambda_from_norms(norms);
  REQUIRE(est.ratios.size() == 5);
  for (const auto& r : est.ratios) CHECK(*r == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(1.0 / *est.working == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(!lambda_from_norms({1.0}).working.has_value());
  const LambdaEstimate gap = lambda_from_norms({1.0, 0.0, 0.0});
  CHECK(!gap.working.has_value());
}

TEST_CASE("growth factor of the complex seed") {
  const VecField v0 = unit_complex_seed();
  const TimeGrid tg{0.02, 9};
  const GpTable t = compute_gp_table(v0, 5, tg);
  std::optional<double> prev;
  for (int i = 1; i < tg.points; ++i) {
    const LambdaEstimate est = estimate_lambda(t, i);
    REQUIRE(est.working.has_value());
    CHECK(*est.working > 0.0);
    if (prev) CHECK(*est.working >= *prev);
    prev = est.working;
  }
}

TEST_CASE("critical amplitude bisection") {
  int calls = 0;
  auto blows = [&](double a) {
    ++calls;
    return a > 0.5;
  };
  for (double guess : {0.01, 0.5, 0.7, 40.0}) {
    calls = 0;
    const BisectionBracket br = bracket_critical_amplitude(blows, guess, 6);
    CHECK(br.found);
    CHECK(br.lo <= 0.5);
    CHECK(br.hi > 0.5);
    CHECK(br.hi / br.lo <= 2.0);
    CHECK(br.runs == calls);
  }
  const BisectionBracket never = bracket_critical_amplitude([](double) { return false; }, 1.0, 6, 4);
  CHECK(!never.found);
  CHECK_THROWS_AS(bracket_critical_amplitude(blows, 0.0), DomainError);
}
