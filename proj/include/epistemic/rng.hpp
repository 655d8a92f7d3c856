#pragma once

#include <cstdint>
#include <random>

namespace epi {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stream `index` of the master `seed`. Work items draw from their own stream
// so results do not depend on scheduling or thread count.
inline Rng make_stream(std::uint64_t seed, std::uint64_t index) {
  return Rng(mix64(mix64(seed) ^ mix64(index + 0x632be59bd9b4e019ULL)));
}

// Tags that keep the streams of different subsystems apart.
enum class StreamTag : std::uint64_t {
  State = 1,
  Unitary = 2,
  Restart = 3,
  Setting = 4,
  Misalignment = 5,
  Trial = 6,
};

inline std::uint64_t sub_seed(std::uint64_t seed, StreamTag tag, std::uint64_t index = 0) {
  return mix64(mix64(seed ^ (static_cast<std::uint64_t>(tag) << 56)) + index);
}

}  // namespace epi
