#pragma once

#include <cstdint>
#include <limits>

namespace tomolab {

/// Counter-based random stream.
///
/// Output i is a SplitMix64 finalization of (key + i * golden_gamma), where the
/// key is derived from (seed, stream_id). Streams are therefore addressable:
/// `split(k)` yields an independent child stream without advancing the parent,
/// which is what keeps particle-parallel sampling independent of scheduling.
///
/// Satisfies UniformRandomBitGenerator, so it plugs into <random> distributions.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed = 0, std::uint64_t stream_id = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix(key_ + (counter_++) * kGamma); }

  /// Child stream `child` of this stream. Does not advance this stream.
  RngStream split(std::uint64_t child) const;

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::uint64_t position() const { return counter_; }

  static std::uint64_t mix(std::uint64_t z);

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace tomolab
