#ifndef SENSELECT_NUMERIC_HPP
#define SENSELECT_NUMERIC_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace senselect {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log(sum_i exp(args[i])), stable for large magnitudes. -inf entries drop out;
// an all-(-inf) input returns -inf.
inline double log_sum_exp(std::span<const double> args) {
  double max_arg = -kInf;
  for (double a : args) max_arg = std::max(max_arg, a);
  if (!std::isfinite(max_arg)) return max_arg;
  double sum = 0.0;
  for (double a : args) sum += std::exp(a - max_arg);
  return max_arg + std::log(sum);
}

inline double clamp_to(double x, double lo, double hi) {
  return std::min(hi, std::max(lo, x));
}

inline double square(double x) { return x * x; }

}  // namespace senselect

#endif  // SENSELECT_NUMERIC_HPP
