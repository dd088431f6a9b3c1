#include <doctest.h>

#include <cmath>

#include "nskv/error.hpp"
#include "nskv/evolution.hpp"
#include "support.hpp"

using namespace nskv;
using nskv::test::pair_field;
using nskv::test::random_field;
using nskv::test::rel;
using nskv::test::small_flow;

TEST_CASE("heat step") {
  const KLattice lat(0.5, {3, 3, 6});
  const VecField v = random_field(lat, 2);
  CHECK(rel(heat_step(v, 0.0), v) == 0.0);
  CHECK(rel(heat_step(heat_step(v, 0.03), 0.05), heat_step(v, 0.08)) <= 1e-14);
  const VecField pair = pair_field(lat, {0, 0, 6}, Vec3(1, 0, 0));
  const VecField d = heat_step(pair, 1.0 / 9.0);
  CHECK(d[lat.index({0, 0, 6})][0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK_THROWS_AS(heat_step(v, -1.0), DomainError);
}

TEST_CASE("phi functions") {
  CHECK(phi1(0.0) == 1.0);
  CHECK(phi2(0.0) == 0.5);
  for (double z : {-1e-4, -5e-4, -2e-3, -0.5, -30.0}) {
    CHECK(phi1(z) == doctest::Approx(std::expm1(z) / z).epsilon(1e-12));
    CHECK(phi2(z) == doctest::Approx((std::expm1(z) - z) / (z * z)).epsilon(1e-8));
  }
}

TEST_CASE("non-interacting field follows the heat flow") {
  const KLattice lat(1.0, {2, 2, 6});
  const VecField v = pair_field(lat, {0, 0, 4}, Vec3(3, 0, 0));
  ConvPlan plan(lat);
  CHECK(rel(etd_rk2_march(v, 0.05, 10, plan), heat_step(v, 0.05)) <= 1e-14);
  const PicardResult p = picard_solve(v, 0.05, 16, 1e-13, plan);
  CHECK(rel(p.v, heat_step(v, 0.05)) <= 1e-14);
  CHECK(p.iterations <= 1);
}

TEST_CASE("etd-rk2 is second order") {
  const VecField v = build_antisym_seed(small_flow(60.0));
  ConvPlan plan(v.lattice());
  const double T = 0.02;
  const VecField ref = etd_rk2_march(v, T, 256, plan);
  const double e1 = rel(etd_rk2_march(v, T, 16, plan), ref);
  const double e2 = rel(etd_rk2_march(v, T, 32, plan), ref);
  const double order = std::log2(e1 / e2);
  CHECK(order >= 1.7);
  CHECK(order <= 2.3);
}

TEST_CASE("picard and etd-rk2 agree") {
  const VecField v = build_antisym_seed(small_flow(5.0));
  ConvPlan plan(v.lattice());
  const double T = 0.01;
  const VecField a = etd_rk2_march(v, T, 256, plan);
  const PicardResult b = picard_solve(v, T, 256, 1e-14, plan);
  CHECK(rel(b.v, a) <= 1e-6);
}

TEST_CASE("picard reports divergence") {
  FlowConfig c = small_flow(1.0);
  const VecField unit = build_complex_seed(c);
  ConvPlan plan(unit.lattice());
  VecField big = unit;
  big *= 4000.0;
  CHECK_THROWS_AS(picard_solve(big, 0.1, 32, 1e-13, plan), NoConvergenceError);
}

TEST_CASE("boundary guard") {
  FlowConfig c = small_flow(1.0);
  c.half_extents = {10, 10, 8};
  const KLattice lat = c.lattice();
  CHECK(boundary_guard(build_antisym_seed(c), 0.2) <= 1e-12);
  CHECK(boundary_guard(pair_field(lat, {10, 0, 1}, Vec3(0, 1, 0)), 0.2) == doctest::Approx(1.0));
  CHECK(boundary_guard(VecField(lat), 0.2) == 0.0);
}

TEST_CASE("simulation of the zero seed") {
  const KLattice lat(1.0, {4, 4, 8});
  SimulationSettings s;
  s.horizon = 0.01;
  s.record_interval = 0.0025;
  const SimulationResult r = run_simulation(VecField(lat, Eigen::Matrix3Xd::Zero(3, lat.node_count()), {true, true}), s);
  CHECK(r.status == RunStatus::completed);
  REQUIRE(r.series.rows.size() == 5);
  for (const DiagRow& row : r.series.rows) {
    CHECK(row.energy == 0.0);
    CHECK(row.enstrophy == 0.0);
    CHECK(row.max_speed == 0.0);
    CHECK(row.align_cos == 0.0);
    CHECK(row.boundary_frac == 0.0);
  }
}

TEST_CASE("small real flow dissipates energy") {
  const VecField v = build_antisym_seed(small_flow(20.0));
  SimulationSettings s;
  s.horizon = 0.05;
  s.record_interval = 0.005;
  std::size_t events = 0;
  const SimulationResult r = run_simulation(v, s, [&](const RunEvent& e) {
    CHECK(e.record == events);
    ++events;
  });
  CHECK(r.status == RunStatus::completed);
  CHECK(events == r.series.rows.size());
  REQUIRE(r.series.rows.size() == 11);
  CHECK(r.series.rows.back().t == doctest::Approx(0.05).epsilon(1e-14));
  for (std::size_t i = 1; i < r.series.rows.size(); ++i)
    CHECK(r.series.rows[i].energy < r.series.rows[i - 1].energy);
}

TEST_CASE("diagnostic series enforces increasing time") {
  DiagSeries s;
  s.push(DiagRow{0.0});
  s.push(DiagRow{1.0});
  CHECK_THROWS(s.push(DiagRow{1.0}));
}
