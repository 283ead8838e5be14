#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace abcmc {

/// Identifies one independent random stream. The same (master_seed, stream_id)
/// pair always produces the same variate sequence, on any platform and for any
/// worker count.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;

  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

/// Counter-based generator (Philox4x32-10). The master seed is the key and the
/// stream id occupies the upper half of the 128-bit counter, so streams never
/// overlap.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(SeedSpec seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on the open interval (0, 1).
  double uniform_open();

  /// Raw Philox block function, exposed for known-answer tests.
  static std::array<std::uint32_t, 4> philox_block(std::array<std::uint32_t, 4> counter,
                                                   std::array<std::uint32_t, 2> key);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> buffer_{};
  int next_ = 4;
};

/// Derives an independent master seed for a named purpose ("observed", "abc", ...).
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view tag);

}  // namespace abcmc
