#pragma once

#include <cstdint>
#include <random>

namespace sprt {

using Engine = std::mt19937_64;

// splitmix64 finalizer over (master, stream). Consecutive stream ids map to
// decorrelated engine seeds, so per-trajectory engines can be created from
// the trajectory index alone; this is what makes ensemble results
// independent of thread count and iteration order.
constexpr std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline Engine make_engine(std::uint64_t master, std::uint64_t stream) {
  return Engine(mix_seed(master, stream));
}

}  // namespace sprt
