#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace ipd {

// SplitMix64 step; used to derive independent stream seeds from a master seed.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

// Seed for the stream identified by `path` under `master`. Distinct paths give
// statistically independent streams, so adding a match or an agent never
// shifts the draws seen by any other.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1) with 53 bits of resolution. Computed from raw engine
  // output so the sequence is identical across standard libraries.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform integer in [0, n). Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace ipd
