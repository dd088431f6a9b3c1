#include "nskv/snapshot.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

#include "nskv/error.hpp"

namespace nskv {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

namespace {

template <class T>
void put(std::vector<unsigned char>& buf, T v) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  buf.insert(buf.end(), b, b + sizeof(T));
}

template <class T>
T get(const unsigned char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

std::uint32_t crc(const unsigned char* data, std::size_t n) {
  return static_cast<std::uint32_t>(::crc32(::crc32(0L, Z_NULL, 0), data, static_cast<uInt>(n)));
}

}  // namespace

std::uint8_t seed_tag(SeedKind k) {
  switch (k) {
    case SeedKind::zero: return 0;
    case SeedKind::complex_lobe: return 1;
    case SeedKind::antisymmetric: return 2;
  }
  return 255;
}

void write_snapshot(const std::string& path, const VecField& field, double time, std::uint8_t tag) {
  const KLattice& lat = field.lattice();
  std::vector<unsigned char> head;
  head.reserve(kSnapshotHeaderSize);
  head.insert(head.end(), {'N', 'S', 'K', 'V', '1'});
  put<std::uint16_t>(head, kSnapshotVersion);
  put<double>(head, lat.step());
  for (int a = 0; a < 3; ++a) put<std::int32_t>(head, lat.half_extent(a));
  put<double>(head, time);
  put<std::uint8_t>(head, tag);
  put<std::uint8_t>(head, static_cast<std::uint8_t>((field.antisymmetric() ? 1 : 0) | (field.solenoidal() ? 2 : 0)));
  put<std::uint32_t>(head, crc(head.data(), head.size()));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(head.data()), static_cast<std::streamsize>(head.size()));
  out.write(reinterpret_cast<const char*>(field.values().data()),
            static_cast<std::streamsize>(sizeof(double) * 3 * lat.node_count()));
  if (!out) throw IoError("write to '" + path + "' failed");
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  unsigned char head[kSnapshotHeaderSize];
  in.read(reinterpret_cast<char*>(head), kSnapshotHeaderSize);
  if (in.gcount() != static_cast<std::streamsize>(kSnapshotHeaderSize))
    throw IntegrityError("'" + path + "': truncated header");
  if (std::memcmp(head, "NSKV1", 5) != 0) throw IntegrityError("'" + path + "': bad magic");
  if (get<std::uint32_t>(head + 37) != crc(head, 37)) throw IntegrityError("'" + path + "': header CRC mismatch");
  const auto version = get<std::uint16_t>(head + 5);
  if (version != kSnapshotVersion)
    throw UnsupportedVersionError("'" + path + "': snapshot version " + std::to_string(version) + " is not supported");

  const double step = get<double>(head + 7);
  const Index3 half{get<std::int32_t>(head + 15), get<std::int32_t>(head + 19), get<std::int32_t>(head + 23)};
  KLattice lat;
  try {
    lat = KLattice(step, half);
  } catch (const DomainError&) {
    throw IntegrityError("'" + path + "': invalid lattice in header");
  }
  Snapshot s;
  s.time = get<double>(head + 27);
  s.seed_tag = head[35];
  const std::uint8_t flags = head[36];
  Eigen::Matrix3Xd values(3, static_cast<Eigen::Index>(lat.node_count()));
  const auto bytes = static_cast<std::streamsize>(sizeof(double) * 3 * lat.node_count());
  in.read(reinterpret_cast<char*>(values.data()), bytes);
  if (in.gcount() != bytes) throw IntegrityError("'" + path + "': truncated payload");
  s.field = VecField(lat, std::move(values), {(flags & 1) != 0, (flags & 2) != 0});
  return s;
}

}  // namespace nskv
