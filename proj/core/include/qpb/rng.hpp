#pragma once

#include <cstdint>
#include <limits>

namespace qpb {

std::uint64_t splitmix64(std::uint64_t x);

// Counter-based generator: the n-th output depends only on (seed, stream, n),
// so any trial can be regenerated independently of scheduling.
class StreamRng {
 public:
  using result_type = std::uint64_t;

  StreamRng(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  // Uniform double in [0, 1) with 53 random bits.
  double uniform();

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Derive a sub-stream id from a parent stream and an index (e.g. trial within a size).
std::uint64_t substream(std::uint64_t stream, std::uint64_t index);

}  // namespace qpb
