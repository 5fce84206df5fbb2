#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace landscape {

// Philox4x32-10 (Salmon, Moraes, Dror, Shaw; SC'11). Stateless bijection of a
// 128-bit counter under a 64-bit key.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter apply(Counter ctr, Key key) noexcept;
};

// Mixing function used to derive keys from user seeds and domain tags.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Domain tags keep independent uses of the same master seed on disjoint keys.
enum class StreamDomain : std::uint64_t {
  omega = 0x6f6d656761ULL,
  resample = 0x7265736d70ULL,
  bootstrap = 0x626f6f7473ULL,
  synthetic = 0x73796e7468ULL,
  coarse = 0x636f617273ULL,
};

// A counter-based stream: key = f(seed, domain), counter = (block, stream).
// Two streams with different (seed, domain, stream) never share counters, so
// draws are reproducible regardless of evaluation order.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, StreamDomain domain, std::uint64_t stream);

  std::uint64_t next_u64() noexcept;
  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  // Uniform integer on [0, n).
  std::size_t below(std::size_t n) noexcept;

  // Single keyed draw without constructing a stream: the value at block
  // `block` of stream `stream`. Used for site-keyed fields.
  static double uniform_at(std::uint64_t seed, StreamDomain domain,
                           std::uint64_t stream, std::uint64_t block) noexcept;

 private:
  Philox4x32::Key key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
};

inline double u64_to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace landscape
