#pragma once

// Seeded randomness with a platform-independent output sequence.
//
// std::mt19937_64 and std::seed_seq have fully specified algorithms, so the
// raw stream is identical everywhere. Standard distributions are not, so
// bounded integers and unit doubles are derived here from raw draws.

#include <cstdint>
#include <random>
#include <string_view>

namespace attrib::stats {

class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  // Independent stream for a named sub-task under one master seed.
  Rng(std::uint64_t seed, std::string_view stream);

  std::uint64_t next() { return engine_(); }
  // Uniform in [0, bound); bound > 0. Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t bound);
  // Uniform in [0, 1) with 53 random bits.
  double unit();

 private:
  std::mt19937_64 engine_;
};

// FNV-1a, used to name streams.
std::uint64_t fnv1a(std::string_view text);

}  // namespace attrib::stats
