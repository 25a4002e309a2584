#pragma once

// Philox4x64-10 counter-based generator (Random123 family). A stream is
// identified by (seed, stream id); draws within a stream walk the counter, so
// any block of work can be regenerated independently of scheduling.

#include <array>
#include <cstdint>
#include <limits>

namespace dipolefield {

namespace detail {
__extension__ typedef unsigned __int128 uint128;
}  // namespace detail

class Philox4x64 {
 public:
  using Counter = std::array<std::uint64_t, 4>;
  using Key = std::array<std::uint64_t, 2>;

  static Counter generate(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      ctr = single_round(ctr, key);
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    return ctr;
  }

 private:
  static constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
  static constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
  static constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

  static Counter single_round(const Counter& c, const Key& k) noexcept {
    const detail::uint128 p0 = static_cast<detail::uint128>(kMul0) * c[0];
    const detail::uint128 p1 = static_cast<detail::uint128>(kMul1) * c[2];
    const auto hi0 = static_cast<std::uint64_t>(p0 >> 64);
    const auto lo0 = static_cast<std::uint64_t>(p0);
    const auto hi1 = static_cast<std::uint64_t>(p1 >> 64);
    const auto lo1 = static_cast<std::uint64_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
};

/// Sequential 64-bit draws from one Philox stream. Satisfies
/// UniformRandomBitGenerator.
class PhiloxStream {
 public:
  using result_type = std::uint64_t;

  PhiloxStream(std::uint64_t seed, std::uint64_t stream) noexcept
      : key_{seed, 0x64697066656c6421ULL}, counter_{0, stream, 0, 0} {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    if (index_ == 4) {
      buffer_ = Philox4x64::generate(counter_, key_);
      ++counter_[0];
      index_ = 0;
    }
    return buffer_[index_++];
  }

  /// Uniform on the open interval (0, 1) with 53-bit resolution.
  double uniform_open() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  Philox4x64::Key key_;
  Philox4x64::Counter counter_;
  Philox4x64::Counter buffer_{};
  int index_ = 4;
};

}  // namespace dipolefield
