#pragma once

#include <cstdint>
#include <random>

namespace mfdfa {

/// Seeded stream built on std::mt19937_64, whose output sequence is fixed by
/// the C++ standard (the 10000th draw from the default seed is
/// 9981545732273789042). All derived variates use explicit transforms rather
/// than <random> distributions, whose algorithms are implementation-defined.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1].
  double uniform_pos() { return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53; }

  /// Unbiased integer in [0, bound) by rejection sampling.
  std::uint64_t below(std::uint64_t bound);

  /// Standard normal via the Box-Muller transform (pairs are cached).
  double normal();

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mfdfa
