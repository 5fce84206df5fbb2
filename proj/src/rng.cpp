#include "landscape/rng.hpp"

namespace landscape {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) noexcept {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

Philox4x32::Key make_key(std::uint64_t seed, StreamDomain domain) noexcept {
  const std::uint64_t k = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(domain)));
  return {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
}

Philox4x32::Counter make_counter(std::uint64_t block, std::uint64_t stream) noexcept {
  return {static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
}

}  // namespace

Philox4x32::Counter Philox4x32::apply(Counter ctr, Key key) noexcept {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RandomStream::RandomStream(std::uint64_t seed, StreamDomain domain, std::uint64_t stream)
    : key_(make_key(seed, domain)), stream_(stream) {}

std::uint64_t RandomStream::next_u64() noexcept {
  if (used_ >= 4) {
    buffer_ = Philox4x32::apply(make_counter(block_++, stream_), key_);
    used_ = 0;
  }
  const std::uint64_t hi = buffer_[used_];
  const std::uint64_t lo = buffer_[used_ + 1];
  used_ += 2;
  return (hi << 32) | lo;
}

double RandomStream::uniform() noexcept { return u64_to_unit(next_u64()); }

std::size_t RandomStream::below(std::size_t n) noexcept {
  const unsigned __int128 wide = static_cast<unsigned __int128>(next_u64()) * n;
  return static_cast<std::size_t>(wide >> 64);
}

double RandomStream::uniform_at(std::uint64_t seed, StreamDomain domain,
                                std::uint64_t stream, std::uint64_t block) noexcept {
  const auto out = Philox4x32::apply(make_counter(block, stream), make_key(seed, domain));
  return u64_to_unit((static_cast<std::uint64_t>(out[0]) << 32) | out[1]);
}

}  // namespace landscape
