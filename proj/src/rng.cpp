#include "todsim/rng.hpp"

namespace todsim {
namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t Rng::next_u64() { return splitmix64(state_); }

std::uint64_t Rng::uniform(std::uint64_t bound) {
  // Lemire's multiply-shift; the slight bias is irrelevant at 64 bits.
  const std::uint64_t x = next_u64();
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(x) * static_cast<unsigned __int128>(bound)) >> 64);
}

double Rng::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t state = base ^ (0x517cc1b727220a95ULL * (stream + 1));
  std::uint64_t mixed = splitmix64(state);
  return mixed == 0 ? 0x6b79b35f02467df1ULL : mixed;
}

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  return mix_seed(mix_seed(base, a), b);
}

}  // namespace todsim
