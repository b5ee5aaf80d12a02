#pragma once

#include <cstdint>
#include <cmath>

namespace arvdm {

/// Counter-based generator: every variate is a pure function of
/// (seed, stream, counter), built from the splitmix64 finalizer. Streams are
/// handed out per path / per trial, so concurrent consumers produce output
/// independent of scheduling.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(mix(mix(seed + 0x9e3779b97f4a7c15ULL) ^
                 mix(stream + 0xbf58476d1ce4e5b9ULL))),
        counter_(0) {}

  std::uint64_t next_u64() {
    return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_);
  }

  /// Uniform in (0, 1]; never returns 0, so logs are safe.
  double uniform() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; consumes exactly two counter steps.
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace arvdm
