#pragma once

#include <cstdint>
#include <random>

namespace mfrmab {

using Rng = std::mt19937_64;

/// Named streams derived from one master seed. Each consumer owns its
/// stream, so e.g. switching the learning algorithm leaves the environment
/// draws untouched.
enum class Stream : std::uint32_t {
  Environment = 1,
  Sampler = 2,
  Dataset = 3,
};

inline Rng make_stream(std::uint64_t master_seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                    static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(stream), 0x6d667262u};
  return Rng(seq);
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

}  // namespace mfrmab
