#include <doctest.h>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

#include <zlib.h>

#include "nskv/config.hpp"
#include "nskv/csv.hpp"
#include "nskv/error.hpp"
#include "nskv/snapshot.hpp"
#include "support.hpp"

using namespace nskv;
namespace fs = std::filesystem;

namespace {

std::string temp_path(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "nskv_unit";
  fs::create_directories(dir);
  return (dir / name).string();
}

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("minimal config gets defaults") {
  const RunConfig c = parse_config("seed = antisymmetric\na = 6\nb = 3\nenergy = 1e6\n# comment\n");
  CHECK(c.seed == SeedKind::antisymmetric);
  CHECK(c.flow.a == 6.0);
  CHECK(*c.flow.target_energy == 1e6);
  CHECK(!c.flow.amplitude);
  CHECK(c.tau == 1.5625e-8);
  CHECK(c.integrator == Integrator::etd_rk2);
  CHECK(c.shell_fraction == 0.2);
  CHECK(c.guard_threshold == 1e-3);
  CHECK(c.series_order == 6);
  CHECK(c.echo.count("a") == 1);
}

TEST_CASE("config errors name key and line") {
  const std::string e = error_of("seed = complex\na = -1\namplitude = 1\n");
  CHECK(e.find("line 2") != std::string::npos);
  CHECK(e.find("a") != std::string::npos);
  CHECK(error_of("seed = antisymmetric\nenergy = 1\nbogus = 3\n").find("bogus") != std::string::npos);
  CHECK(!error_of("a = 6\nenergy = 1\n").empty());                                  // no seed
  CHECK(!error_of("seed = antisymmetric\namplitude = 1\nenergy = 2\n").empty());  // both
  CHECK(!error_of("seed = spiral\n").empty());
  CHECK(!error_of("seed = complex\namplitude = 1\nn1 = 0\n").empty());
  CHECK(!error_of("seed = complex\namplitude = x\n").empty());
  CHECK(!error_of("seed = complex\namplitude 1\n").empty());
}

TEST_CASE("presets") {
  const RunConfig p = parse_config("preset = paper2\n");
  CHECK(p.flow.a == 30.0);
  CHECK(*p.flow.target_energy == 2.5e5);
  CHECK(p.flow.step == 1.0);
  CHECK(p.tau == 1.5625e-8);
  CHECK(p.flow.half_extents == Index3{254, 254, 3000});
  CHECK(p.seed == SeedKind::antisymmetric);

  const RunConfig d = parse_config("preset = desk\nhorizon_tau = 100\nrecord_every_tau = 10\n");
  CHECK(d.flow.a == 6.0);
  CHECK(d.flow.half_extents == Index3{16, 16, 64});
  CHECK(d.horizon_tau == 100.0);

  CHECK(parse_config("preset = tiny\n").seed == SeedKind::complex_lobe);
  CHECK(parse_config("preset = scaling\n").scaling_lambda == 2);
  CHECK(!error_of("preset = huge\n").empty());
}

TEST_CASE("snapshot round trip") {
  const KLattice lat(0.5, {3, 2, 5});
  const VecField f = nskv::test::random_field(lat, 42, true);
  const std::string path = temp_path("round.nskv");
  write_snapshot(path, f, 0.125, seed_tag(SeedKind::antisymmetric));
  const Snapshot s = read_snapshot(path);
  CHECK(s.time == 0.125);
  CHECK(s.seed_tag == 2);
  CHECK(s.field.lattice() == lat);
  CHECK(s.field.antisymmetric());
  CHECK((s.field.values().array() == f.values().array()).all());
  CHECK(fs::file_size(path) == kSnapshotHeaderSize + 3 * sizeof(double) * lat.node_count());
}

TEST_CASE("snapshot damage") {
  const KLattice lat(1.0, {2, 2, 2});
  const VecField f = nskv::test::random_field(lat, 1);
  const std::string path = temp_path("damage.nskv");
  write_snapshot(path, f, 1.0);

  const std::string cut = temp_path("cut.nskv");
  fs::copy_file(path, cut, fs::copy_options::overwrite_existing);
  fs::resize_file(cut, fs::file_size(path) - 8);
  CHECK_THROWS_AS(read_snapshot(cut), IntegrityError);
  fs::resize_file(cut, 20);
  CHECK_THROWS_AS(read_snapshot(cut), IntegrityError);

  auto flip = [&](std::size_t offset) {
    const std::string p = temp_path("flip.nskv");
    fs::copy_file(path, p, fs::copy_options::overwrite_existing);
    std::fstream io(p, std::ios::in | std::ios::out | std::ios::binary);
    io.seekg(static_cast<std::streamoff>(offset));
    char c;
    io.get(c);
    io.seekp(static_cast<std::streamoff>(offset));
    io.put(static_cast<char>(c ^ 0x10));
    return p;
  };
  CHECK_THROWS_AS(read_snapshot(flip(10)), IntegrityError);
  CHECK_THROWS_AS(read_snapshot(flip(0)), IntegrityError);
  const Snapshot s = read_snapshot(flip(kSnapshotHeaderSize + 3));
  CHECK(!(s.field.values().array() == f.values().array()).all());

  // version 2 with a valid checksum
  {
    std::ifstream in(path, std::ios::binary);
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    bytes[5] = 2;
    const auto crc = static_cast<std::uint32_t>(
        ::crc32(::crc32(0L, Z_NULL, 0), reinterpret_cast<const Bytef*>(bytes.data()), 37));
    std::memcpy(bytes.data() + 37, &crc, 4);
    const std::string p = temp_path("v2.nskv");
    std::ofstream(p, std::ios::binary).write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    CHECK_THROWS_AS(read_snapshot(p), UnsupportedVersionError);
  }
  CHECK_THROWS_AS(read_snapshot(temp_path("missing.nskv")), IoError);
}

TEST_CASE("diagnostics csv round trip") {
  DiagSeries s;
  s.push(DiagRow{0.0, 1.0 / 3.0, 2.0, 3.0, 1e-5, 0.0});
  s.push(DiagRow{1e-6, 0.1, 2.5e9, 4536.25, 0.17, 1.2e-3});
  const std::string path = temp_path("diag.csv");
  write_diagnostics_csv(path, s, 1.5625e-8);
  const DiagSeries r = read_diagnostics_csv(path, 1.5625e-8);
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[0].energy == s.rows[0].energy);
  CHECK(r.rows[1].t == doctest::Approx(1e-6).epsilon(1e-15));
  CHECK(r.rows[1].enstrophy == s.rows[1].enstrophy);
  CHECK(format_number(0.1) == "1.0000000000000001e-01");
}
