#pragma once

#include <cstdint>
#include <random>

namespace reidfit {

// splitmix64 finalizer; spreads seeds and derives substream keys.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Substream key for (master, index). Depends only on the pair, never on call
// order, so parallel consumers get identical streams.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(mix64(master) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

// Seeded uniform stream. uniform01() stays inside the open interval (0,1) so
// inverse-CDF transforms never produce support endpoints.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(mix64(seed)) {}

  static RngStream substream(std::uint64_t master, std::uint64_t index) {
    return RngStream(derive_seed(master, index));
  }

  std::uint64_t next_u64() { return engine_(); }

  double uniform01() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform index in [0, n); n must be positive.
  std::size_t uniform_index(std::size_t n) {
    return static_cast<std::size_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace reidfit
