#pragma once

// Binary dump of a BondConfig. Little-endian layout:
//
//   offset  size  field
//   0       4     magic "DACB"
//   4       4     u32 version (1)
//   8       4     u32 topology (0 square, 1 triangular)
//   12      16    i32 core x0, x1, y0, y1
//   28      4     i32 pad
//   32      8     f64 p (IEEE 754)
//   40      8     u64 seed
//   48      8     u64 edge count E
//   56      ceil(E/8)  edge bits in canonical edge order, LSB first

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "dac/bonds.hpp"

namespace dac {

inline constexpr std::array<char, 4> kBondMagic{'D', 'A', 'C', 'B'};
inline constexpr std::uint32_t kBondFormatVersion = 1;

class FormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

template <class T>
void put_le(std::ostream& os, T value) {
  std::uint64_t u = 0;
  std::memcpy(&u, &value, sizeof(T));
  for (std::size_t i = 0; i < sizeof(T); ++i) os.put(static_cast<char>((u >> (8 * i)) & 0xffu));
}

template <class T>
T get_le(std::istream& is) {
  std::uint64_t u = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    const int c = is.get();
    if (c == std::char_traits<char>::eof()) throw FormatError("bond dump: truncated header");
    u |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
  }
  T value;
  std::memcpy(&value, &u, sizeof(T));
  return value;
}

}  // namespace detail

inline void write_bonds(std::ostream& os, const BondConfig& b) {
  os.write(kBondMagic.data(), kBondMagic.size());
  const RectRegion& c = b.window().core;
  detail::put_le<std::uint32_t>(os, kBondFormatVersion);
  detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(b.topology()));
  for (const int v : {c.x0, c.x1, c.y0, c.y1, b.window().pad}) detail::put_le<std::int32_t>(os, v);
  detail::put_le<double>(os, b.p());
  detail::put_le<std::uint64_t>(os, b.seed());
  detail::put_le<std::uint64_t>(os, static_cast<std::uint64_t>(b.edge_count()));
  std::uint8_t byte = 0;
  int bit = 0;
  b.for_each_edge([&](const Edge&, bool open) {
    if (open) byte |= static_cast<std::uint8_t>(1u << bit);
    if (++bit == 8) {
      os.put(static_cast<char>(byte));
      byte = 0;
      bit = 0;
    }
  });
  if (bit != 0) os.put(static_cast<char>(byte));
}

inline BondConfig read_bonds(std::istream& is) {
  std::array<char, 4> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kBondMagic) throw FormatError("bond dump: bad magic");
  if (detail::get_le<std::uint32_t>(is) != kBondFormatVersion) throw FormatError("bond dump: unsupported version");
  const auto topo = detail::get_le<std::uint32_t>(is);
  if (topo > 1) throw FormatError("bond dump: unknown topology");
  Window w;
  w.core.x0 = detail::get_le<std::int32_t>(is);
  w.core.x1 = detail::get_le<std::int32_t>(is);
  w.core.y0 = detail::get_le<std::int32_t>(is);
  w.core.y1 = detail::get_le<std::int32_t>(is);
  w.pad = detail::get_le<std::int32_t>(is);
  if (!w.core.valid() || w.pad < 0) throw FormatError("bond dump: invalid window");
  const double p = detail::get_le<double>(is);
  const auto seed = detail::get_le<std::uint64_t>(is);
  const auto edges = detail::get_le<std::uint64_t>(is);
  BondConfig b(static_cast<Topology>(topo), w, p, seed);
  if (edges != static_cast<std::uint64_t>(b.edge_count())) throw FormatError("bond dump: edge count mismatch");
  std::vector<char> bits((edges + 7) / 8);
  is.read(bits.data(), static_cast<std::streamsize>(bits.size()));
  if (!is) throw FormatError("bond dump: truncated edge bits");
  const auto dirs = bond_directions(b.topology());
  auto masks = b.mutable_masks();
  const Grid& g = b.grid();
  std::uint64_t k = 0;
  for (std::int64_t i = 0; i < g.size(); ++i) {
    const Vertex v = g.vertex(i);
    for (std::size_t d = 0; d < dirs.size(); ++d) {
      if (!g.contains(v + dirs[d])) continue;
      if ((static_cast<unsigned char>(bits[k / 8]) >> (k % 8)) & 1u)
        masks[static_cast<std::size_t>(i)] |= static_cast<std::uint8_t>(1u << d);
      ++k;
    }
  }
  return b;
}

}  // namespace dac
