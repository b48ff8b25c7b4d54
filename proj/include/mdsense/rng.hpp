#pragma once

// Counter-based random streams. Every generated artifact is a pure function
// of (seed, purpose, parameters), independent of thread schedule or platform
// standard library.

#include <array>
#include <cstdint>
#include <string_view>

namespace mdsense {

/// Philox4x32-10 (Salmon et al., SC'11).
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key);
};

/// Stream of uniform and normal variates keyed by (seed, purpose).
/// Draw i of a stream is a function of i only, so streams may be split by
/// offset without coordination.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::string_view purpose);

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1).
  double uniform();
  /// Standard normal (Box-Muller, both outputs used).
  double normal();
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int buffered_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// Mixes a seed and a purpose tag into a 64-bit stream key.
std::uint64_t derive_key(std::uint64_t seed, std::string_view purpose);

}  // namespace mdsense
