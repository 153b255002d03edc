#pragma once

#include <cstdint>

namespace hao {

/// SplitMix64 stream keyed by (seed, stream index). Streams with different
/// indices are statistically independent, so trial i is reproducible no matter
/// which thread runs it.
class StreamRng {
 public:
  StreamRng(std::uint64_t seed, std::uint64_t stream) : state_(mix(seed ^ mix(stream + kGamma))) {}

  std::uint64_t next() { return mix(state_ += kGamma); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace hao
