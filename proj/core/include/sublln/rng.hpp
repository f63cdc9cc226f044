#pragma once

#include <array>
#include <cstdint>

namespace sublln {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// Every draw is a pure function of (key, counter), so a stream addressed by
/// (seed, replication, step) can be evaluated in any order and on any thread.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit constexpr Philox4x32(std::uint64_t seed) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  [[nodiscard]] constexpr Counter operator()(Counter ctr) const noexcept {
    Key key = key_;
    for (int round = 0; round < 10; ++round) {
      ctr = single_round(ctr, key);
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static constexpr Counter single_round(const Counter& c, const Key& k) noexcept {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }

  Key key_;
};

/// Two 64-bit words for the draw addressed by (seed, replication, step).
struct RandomWords {
  std::uint64_t first;
  std::uint64_t second;
};

[[nodiscard]] constexpr RandomWords random_words(std::uint64_t seed, std::uint64_t replication,
                                                 std::uint64_t step) noexcept {
  const Philox4x32 gen(seed);
  const auto out = gen({static_cast<std::uint32_t>(replication),
                        static_cast<std::uint32_t>(replication >> 32),
                        static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32)});
  return {(static_cast<std::uint64_t>(out[1]) << 32) | out[0],
          (static_cast<std::uint64_t>(out[3]) << 32) | out[2]};
}

/// Uniform on [0, 1) with 53 random bits.
[[nodiscard]] constexpr double to_unit_closed_open(std::uint64_t w) noexcept {
  return static_cast<double>(w >> 11) * 0x1.0p-53;
}

/// Uniform on (0, 1]; never zero, so safe under negative powers.
[[nodiscard]] constexpr double to_unit_open_closed(std::uint64_t w) noexcept {
  return static_cast<double>((w >> 11) + 1) * 0x1.0p-53;
}

}  // namespace sublln
