#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace vforge {

/// The toolkit's only random source. std::mt19937_64's output sequence is
/// fixed by the C++ standard, and the helpers below avoid the
/// implementation-defined std::*_distribution templates, so a given seed
/// yields the same draws on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n) by rejection: raw draws below 2^64 mod n are
  /// discarded, the rest are reduced modulo n. Requires n > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t reject_under = (0 - n) % n;
    for (;;) {
      const auto r = engine_();
      if (r >= reject_under) return r % n;
    }
  }

  /// Uniform double in [0, 1) from the top 53 bits of one draw.
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Partial Fisher-Yates: for i = 0..count-1 swap items[i] with
  /// items[i + below(size - i)]. The first `count` items are the sample.
  template <typename T>
  void partial_shuffle(std::vector<T>& items, std::size_t count) {
    const auto n = items.size();
    for (std::size_t i = 0; i < count && i < n; ++i) {
      const auto j = i + static_cast<std::size_t>(below(n - i));
      std::swap(items[i], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace vforge
