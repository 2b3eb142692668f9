#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace xlingevent {

// Deterministic random source with a fixed cross-platform output sequence.
// The mt19937_64 engine output is standardized, but std::shuffle and the
// standard distributions are implementation-defined, so index draws, uniform
// reals and shuffles are derived from raw engine words here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double next_uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  /// Uniform index in [0, n). Rejection-sampled, bias free.
  std::size_t next_index(std::size_t n) {
    if (n <= 1) return 0;
    const std::uint64_t span = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t r;
    do {
      r = engine_();
    } while (r >= limit);
    return static_cast<std::size_t>(r % span);
  }

  /// Fisher-Yates shuffle using next_index draws.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = next_index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace xlingevent
