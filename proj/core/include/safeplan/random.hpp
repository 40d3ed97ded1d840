#pragma once

#include <cstddef>
#include <cstdint>

namespace safeplan {

/// Counter-based generator: the i-th output of stream (seed, stream) is
/// splitmix64_mix(key + (i + 1) * 0x9E3779B97F4A7C15) with
/// key = splitmix64_mix(seed ^ splitmix64_mix(stream + 0x632BE59BD9B4E019)).
/// Outputs depend only on (seed, stream, index), never on platform or
/// scheduling, so bootstrap replicate r always uses stream r.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next();
  /// Uniform integer in [0, bound), bound > 0, without modulo bias.
  std::uint64_t below(std::uint64_t bound);
  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal via Box-Muller.
  double normal();

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64_mix(std::uint64_t z);

} // namespace safeplan
