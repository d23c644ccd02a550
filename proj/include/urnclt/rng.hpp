#pragma once

#include <cstdint>

namespace urnclt {

// Counter-based splittable generator built on the splitmix64 finalizer.
// A stream is a (key, counter) pair; output i depends only on the key and
// the counter value, so independent streams can be consumed on any worker
// in any order with identical results. Stream keys are derived from
// (base_seed, stream_index), which gives every simulated path its own
// statistically independent sequence.
class RngStream {
 public:
  RngStream() : key_(0), counter_(0) {}
  explicit RngStream(std::uint64_t key) : key_(key), counter_(0) {}

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static RngStream for_path(std::uint64_t base_seed, std::uint64_t path_index) {
    std::uint64_t key = mix(base_seed);
    key = mix(key ^ (path_index * 0xD1342543DE82EF95ULL + 0x2545F4914F6CDD1DULL));
    return RngStream(key);
  }

  std::uint64_t next_u64() {
    ++counter_;
    return mix(key_ + counter_ * 0x9E3779B97F4A7C15ULL);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace urnclt
