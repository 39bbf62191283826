#pragma once

#include <cstdint>
#include <random>

namespace nrl {

// Deterministic uniform source. Draws are generated from the raw mt19937_64
// stream rather than std::uniform_real_distribution so that sequences are
// identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform on [0,1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Uniform on {0,...,n-1}.
  int uniform_int(int n) { return static_cast<int>(uniform() * n); }

  std::uint64_t next_seed() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace nrl
