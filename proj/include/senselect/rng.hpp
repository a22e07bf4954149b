#ifndef SENSELECT_RNG_HPP
#define SENSELECT_RNG_HPP

#include <cstdint>
#include <random>

namespace senselect {

using Rng = std::mt19937_64;

// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seed-splitting rule for replication streams. Replication r of a run with
// master seed s draws from mt19937_64 seeded with replication_seed(s, r).
// The rule is a fixed constant of the file-format contract:
//   stream(s, r) = splitmix64(s ^ splitmix64((r + 1) * 0x9E3779B97F4A7C15))
constexpr std::uint64_t replication_seed(std::uint64_t seed, std::uint64_t replication) {
  return splitmix64(seed ^ splitmix64((replication + 1) * 0x9E3779B97F4A7C15ULL));
}

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

inline Rng make_replication_rng(std::uint64_t seed, std::uint64_t replication) {
  return Rng(replication_seed(seed, replication));
}

}  // namespace senselect

#endif  // SENSELECT_RNG_HPP
