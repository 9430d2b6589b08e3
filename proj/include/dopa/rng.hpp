#pragma once

#include <cstdint>

namespace dopa {

// Identifier recorded in every trace so runs state which generator produced
// their randomness.
inline constexpr const char* kRngAlgorithm = "splitmix64";

// Counter-based, splittable, seedable generator (splitmix64). The state is a
// plain 64-bit counter advanced by the golden-ratio increment and hashed on
// output, so streams are cheap to fork and results are identical across
// platforms. One instance per logical stream; never share an instance between
// threads.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform double in the open interval (0, 1). Never returns 0 or 1, which
  // keeps inverse-CDF sampling off the quantile endpoints.
  double next_open01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Derives an independent child stream seed from (seed, stream index).
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 g(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
    g.next_u64();
    return g.next_u64();
  }

 private:
  std::uint64_t state_;
};

}  // namespace dopa
