#ifndef SENSELECT_CONFIGURATION_HPP
#define SENSELECT_CONFIGURATION_HPP

#include <bit>
#include <cstdint>
#include <string>

#include "senselect/errors.hpp"

namespace senselect {

// A sensor activation vector B in {0,1}^N. Sensor k (0-based) is stored at
// bit k of the mask, so the mask doubles as an enumeration index.
class Config {
 public:
  static constexpr int kMaxSensors = 63;

  Config() = default;
  Config(int n, std::uint64_t mask = 0) : mask_(mask), n_(n) {
    if (n < 1 || n > kMaxSensors) throw DimensionMismatch("Config: n out of range");
    if (n < kMaxSensors && (mask >> n) != 0)
      throw DimensionMismatch("Config: mask has bits beyond n");
  }

  static Config all_on(int n) { return Config(n, (n == 64) ? ~0ULL : ((1ULL << n) - 1)); }

  int size() const { return n_; }
  std::uint64_t mask() const { return mask_; }
  int weight() const { return std::popcount(mask_); }

  bool test(int k) const { return (mask_ >> k) & 1ULL; }

  Config with(int k, bool value) const {
    std::uint64_t m = value ? (mask_ | (1ULL << k)) : (mask_ & ~(1ULL << k));
    Config out;
    out.mask_ = m;
    out.n_ = n_;
    return out;
  }

  Config flipped(int k) const { return with(k, !test(k)); }

  bool operator==(const Config& o) const { return mask_ == o.mask_ && n_ == o.n_; }

  // subset relation (this <= other)
  bool subset_of(const Config& o) const { return (mask_ & ~o.mask_) == 0; }

  // "b1 b2 ... bN" with sensor 1 first
  std::string to_string() const {
    std::string s(static_cast<std::size_t>(n_), '0');
    for (int k = 0; k < n_; ++k)
      if (test(k)) s[static_cast<std::size_t>(k)] = '1';
    return s;
  }

 private:
  std::uint64_t mask_ = 0;
  int n_ = 1;
};

// Lexicographic order on the bit string (b1,...,bN): at the lowest-index
// sensor where they differ, the inactive one comes first.
inline bool lex_less(const Config& a, const Config& b) {
  std::uint64_t diff = a.mask() ^ b.mask();
  if (diff == 0) return false;
  std::uint64_t low = diff & (~diff + 1);
  return (a.mask() & low) == 0;
}

inline std::uint64_t config_count(int n) {
  if (n < 1 || n > 20) throw TooLarge("config_count: enumeration limited to n <= 20");
  return 1ULL << n;
}

}  // namespace senselect

#endif  // SENSELECT_CONFIGURATION_HPP
