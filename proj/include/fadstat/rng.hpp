#pragma once

#include <cstdint>
#include <random>

namespace fadstat {

// Reproducible stream of randomness: stream k is derived from
// (master_seed, k) alone, so independent workers never need to skip ahead.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
      : engine_(mix(master_seed, stream_index)) {}

  std::mt19937_64& engine() { return engine_; }

  std::uint64_t operator()() { return engine_(); }
  using result_type = std::uint64_t;
  static constexpr std::uint64_t min() { return std::mt19937_64::min(); }
  static constexpr std::uint64_t max() { return std::mt19937_64::max(); }

 private:
  // SplitMix64 finalizer over (seed, stream); decorrelates nearby seeds.
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::mt19937_64 engine_;
};

}  // namespace fadstat
