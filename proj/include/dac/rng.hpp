#pragma once

// Counter-based random numbers (Philox4x32-10, Salmon et al. 2011).
// Every draw is a pure function of (key, counter), so replicas, edges and
// clusters can be sampled in any order or on any thread with identical results.

#include <array>
#include <cstdint>

namespace dac {

class Philox4x32 {
public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit constexpr Philox4x32(std::uint64_t seed) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  constexpr Counter operator()(Counter ctr) const noexcept {
    Key k = key_;
    for (int round = 0; round < 10; ++round) {
      ctr = round_(ctr, k);
      k[0] += kWeyl0;
      k[1] += kWeyl1;
    }
    return ctr;
  }

private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static constexpr Counter round_(const Counter& c, const Key& k) noexcept {
    const std::uint64_t p0 = std::uint64_t{kMul0} * c[0];
    const std::uint64_t p1 = std::uint64_t{kMul1} * c[2];
    return {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
            static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
  }

  Key key_;
};

// Independent draw families sharing one seed.
enum class Stream : std::uint32_t {
  Bond = 1,
  Mark = 2,
  Replica = 3,
  Bootstrap = 4,
};

inline Philox4x32::Counter draw_block(std::uint64_t seed, Stream stream, std::uint64_t index,
                                      std::uint32_t sub = 0) noexcept {
  const Philox4x32 gen(seed);
  return gen({static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
              static_cast<std::uint32_t>(stream), sub});
}

// Block keyed on absolute lattice coordinates, so a site's draws do not
// depend on the window it is sampled in.
inline Philox4x32::Counter draw_block_at(std::uint64_t seed, Stream stream, int x, int y,
                                         std::uint32_t sub = 0) noexcept {
  const Philox4x32 gen(seed);
  return gen({static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y),
              static_cast<std::uint32_t>(stream), sub});
}

inline std::uint64_t draw_u64(std::uint64_t seed, Stream stream, std::uint64_t index,
                              std::uint32_t sub = 0) noexcept {
  const auto b = draw_block(seed, stream, index, sub);
  return (std::uint64_t{b[1]} << 32) | b[0];
}

// Uniform in [0,1) with 53 random bits.
inline double draw_unit(std::uint64_t seed, Stream stream, std::uint64_t index,
                        std::uint32_t sub = 0) noexcept {
  return static_cast<double>(draw_u64(seed, stream, index, sub) >> 11) * 0x1.0p-53;
}

inline double u32_to_unit(std::uint32_t w) noexcept { return static_cast<double>(w) * 0x1.0p-32; }

// Seed of replica `replica` in a run keyed by `seed`.
inline std::uint64_t replica_seed(std::uint64_t seed, std::uint64_t replica) noexcept {
  return draw_u64(seed, Stream::Replica, replica);
}

// Sequential uniform stream for bookkeeping draws (bootstrap resampling).
class CounterStream {
public:
  CounterStream(std::uint64_t seed, Stream stream) noexcept : seed_(seed), stream_(stream) {}

  std::uint64_t next_u64() noexcept { return draw_u64(seed_, stream_, counter_++); }
  double next_unit() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  // Uniform integer in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n) noexcept {
    return static_cast<std::uint64_t>(next_unit() * static_cast<double>(n)) % n;
  }

private:
  std::uint64_t seed_;
  Stream stream_;
  std::uint64_t counter_ = 0;
};

}  // namespace dac
