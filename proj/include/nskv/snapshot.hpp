// Binary field snapshots.
//
// Layout (little-endian):
//   0   char[5]  magic "NSKV1"
//   5   u16      version (1)
//   7   f64      lattice step
//   15  i32 x3   half-extents N1, N2, N3
//   27  f64      time
//   35  u8       seed kind (0 zero, 1 complex, 2 antisymmetric, 255 other)
//   36  u8       flags (bit 0 antisymmetric, bit 1 solenoidal)
//   37  u32      CRC-32 of bytes [0, 37)
//   41  f64[3 * nodes] node-ordered triplets, k1 slowest
//
// Only the header is checksummed; a damaged payload reads back as-is.
#pragma once

#include <cstdint>
#include <string>

#include "nskv/lattice.hpp"
#include "nskv/seed.hpp"

namespace nskv {

inline constexpr std::uint16_t kSnapshotVersion = 1;
inline constexpr std::size_t kSnapshotHeaderSize = 41;

struct Snapshot {
  VecField field;
  double time = 0.0;
  std::uint8_t seed_tag = 255;
};

std::uint8_t seed_tag(SeedKind k);

void write_snapshot(const std::string& path, const VecField& field, double time, std::uint8_t seed_tag = 255);
Snapshot read_snapshot(const std::string& path);

}  // namespace nskv
