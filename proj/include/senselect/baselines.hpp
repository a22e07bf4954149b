#ifndef SENSELECT_BASELINES_HPP
#define SENSELECT_BASELINES_HPP

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "senselect/configuration.hpp"
#include "senselect/energy.hpp"
#include "senselect/errors.hpp"
#include "senselect/numeric.hpp"

namespace senselect {

struct BaselineResult {
  Config configuration;
  double cost = 0.0;
  std::size_t evaluations = 0;  // distinct MSE evaluations consumed
};

enum class Improvement { Strict, Weak };

namespace detail {

// Per-call memo so repeated queries of one subset count once.
class CountingMse {
 public:
  explicit CountingMse(const MseFn& f) : f_(f) {}

  double operator()(const Config& b) {
    auto it = memo_.find(b.mask());
    if (it != memo_.end()) return it->second;
    double v = f_(b);
    memo_.emplace(b.mask(), v);
    return v;
  }

  std::size_t evaluations() const { return memo_.size(); }

 private:
  const MseFn& f_;
  std::unordered_map<std::uint64_t, double> memo_;
};

inline bool improves(double candidate, double incumbent, Improvement mode) {
  return mode == Improvement::Strict ? candidate < incumbent : candidate <= incumbent;
}

}  // namespace detail

// Serial pass k = 1..N; sensor k kept iff adding it improves h = f + lambda|S|.
inline BaselineResult greedy1(const MseFn& f, double lambda, int n,
                              Improvement mode = Improvement::Strict) {
  detail::CountingMse mse(f);
  Config s(n);
  double cost = mse(s);
  for (int k = 0; k < n; ++k) {
    Config cand = s.with(k, true);
    double cand_cost = mse(cand) + lambda * cand.weight();
    if (detail::improves(cand_cost, cost, mode)) {
      s = cand;
      cost = cand_cost;
    }
  }
  return BaselineResult{s, cost, mse.evaluations()};
}

// N rounds; each round adds the best-improving sensor, lowest index on ties.
// A round with no improving sensor leaves the set frozen; with short_circuit
// the remaining rounds are skipped, which cannot change the result.
inline BaselineResult greedy2(const MseFn& f, double lambda, int n,
                              Improvement mode = Improvement::Strict,
                              bool short_circuit = false) {
  detail::CountingMse mse(f);
  Config s(n);
  double cost = mse(s);
  for (int round = 0; round < n; ++round) {
    int best_k = -1;
    double best_cost = kInf;
    for (int k = 0; k < n; ++k) {
      if (s.test(k)) continue;
      Config cand = s.with(k, true);
      double cand_cost = mse(cand) + lambda * cand.weight();
      if (cand_cost < best_cost) {
        best_cost = cand_cost;
        best_k = k;
      }
    }
    if (best_k < 0 || !detail::improves(best_cost, cost, mode)) {
      if (short_circuit) break;
      continue;
    }
    s = s.with(best_k, true);
    cost = best_cost;
  }
  return BaselineResult{s, cost, mse.evaluations()};
}

// Adds the MSE-minimizing sensor each round until |S| = nbar.
inline BaselineResult greedy2_cardinality(const MseFn& f, int nbar, int n) {
  if (nbar > n) throw ConfigError("greedy2_cardinality: nbar > N");
  detail::CountingMse mse(f);
  Config s(n);
  double cost = mse(s);
  while (s.weight() < nbar) {
    int best_k = -1;
    double best_cost = kInf;
    for (int k = 0; k < n; ++k) {
      if (s.test(k)) continue;
      double cand_cost = mse(s.with(k, true));
      if (cand_cost < best_cost) {
        best_cost = cand_cost;
        best_k = k;
      }
    }
    s = s.with(best_k, true);
    cost = best_cost;
  }
  return BaselineResult{s, cost, mse.evaluations()};
}

// Full enumeration of h = f + lambda|B|; ties broken by the lexicographically
// smallest bit vector.
inline BaselineResult opt_exhaustive(const MseFn& f, double lambda, int n) {
  const std::uint64_t count = config_count(n);
  detail::CountingMse mse(f);
  Config best(n);
  double best_cost = mse(best);
  for (std::uint64_t m = 1; m < count; ++m) {
    Config b(n, m);
    double cost = mse(b) + lambda * b.weight();
    if (cost < best_cost || (cost == best_cost && lex_less(b, best))) {
      best_cost = cost;
      best = b;
    }
  }
  return BaselineResult{best, best_cost, mse.evaluations()};
}

// Enumeration restricted to the weight-nbar shell, minimizing the MSE alone.
inline BaselineResult opt_shell(const MseFn& f, int nbar, int n) {
  const std::uint64_t count = config_count(n);
  if (nbar > n) throw ConfigError("opt_shell: nbar > N");
  detail::CountingMse mse(f);
  bool found = false;
  Config best(n);
  double best_cost = kInf;
  for (std::uint64_t m = 0; m < count; ++m) {
    Config b(n, m);
    if (b.weight() != nbar) continue;
    double cost = mse(b);
    if (!found || cost < best_cost || (cost == best_cost && lex_less(b, best))) {
      best_cost = cost;
      best = b;
      found = true;
    }
  }
  return BaselineResult{best, best_cost, mse.evaluations()};
}

}  // namespace senselect

#endif  // SENSELECT_BASELINES_HPP
