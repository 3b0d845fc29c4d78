#pragma once

#include <cstdint>

namespace todsim {

// Portable deterministic PRNG (splitmix64). The standard library engines are
// specified but the distributions are not, so byte-identical reruns across
// platforms require rolling the draws ourselves.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  // Uniform in [0, bound). bound must be > 0.
  std::uint64_t uniform(std::uint64_t bound);

  // Uniform in [0, 1).
  double next_double();

 private:
  std::uint64_t state_;
};

// Counter-based seed derivation: the result depends only on (base, stream),
// never on how many draws happened elsewhere.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream);
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b);

}  // namespace todsim
