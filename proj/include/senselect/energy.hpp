#ifndef SENSELECT_ENERGY_HPP
#define SENSELECT_ENERGY_HPP

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <functional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "senselect/configuration.hpp"
#include "senselect/errors.hpp"
#include "senselect/numeric.hpp"

namespace senselect {

// Anything that can price a configuration: h(B) = f(B) + lambda * |B|.
template <class E>
concept EnergyModel = requires(const E& e, const Config& b) {
  { e.h(b) } -> std::convertible_to<double>;
  { e.size() } -> std::convertible_to<int>;
};

using MseFn = std::function<double(const Config&)>;

// Energy backed by a lazily evaluated, memoized MSE term. The memo is bounded
// to 2^min(n,20) entries; past that, values are recomputed on the fly.
class EnergyTable {
 public:
  EnergyTable(int n, MseFn f, double lambda = 0.0)
      : f_(std::move(f)), lambda_(lambda), n_(n) {
    cap_ = 1ULL << std::min(n, 20);
  }

  int size() const { return n_; }
  double lambda() const { return lambda_; }
  void set_lambda(double lambda) { lambda_ = lambda; }

  double f(const Config& b) const {
    auto it = memo_.find(b.mask());
    if (it != memo_.end()) return it->second;
    double v = f_(b);
    ++evals_;
    if (memo_.size() < cap_) memo_.emplace(b.mask(), v);
    return v;
  }

  double h(const Config& b) const { return f(b) + lambda_ * b.weight(); }

  // distinct MSE evaluations so far
  std::size_t evaluations() const { return evals_; }

 private:
  MseFn f_;
  double lambda_;
  int n_;
  std::size_t cap_;
  mutable std::unordered_map<std::uint64_t, double> memo_;
  mutable std::size_t evals_ = 0;
};

// Energy over an explicit table indexed by configuration mask.
class DenseEnergy {
 public:
  DenseEnergy(int n, std::vector<double> f, double lambda = 0.0)
      : f_(std::move(f)), lambda_(lambda), n_(n) {
    if (f_.size() != (1ULL << n)) throw DimensionMismatch("DenseEnergy: table size != 2^n");
  }

  int size() const { return n_; }
  double lambda() const { return lambda_; }
  void set_lambda(double lambda) { lambda_ = lambda; }

  double f(const Config& b) const { return f_[b.mask()]; }
  double h(const Config& b) const { return f_[b.mask()] + lambda_ * b.weight(); }

  const std::vector<double>& table() const { return f_; }
  std::vector<double>& table() { return f_; }

 private:
  std::vector<double> f_;
  double lambda_;
  int n_;
};

// Energy view over an arbitrary MSE callable plus a multiplier; does not own
// the callable.
template <class F>
struct MseEnergy {
  const F* f;
  double lambda;
  int n;
  double h(const Config& b) const { return (*f)(b) + lambda * b.weight(); }
  int size() const { return n; }
};

template <class F>
MseEnergy<F> mse_energy(const F& f, double lambda, int n) {
  return MseEnergy<F>{&f, lambda, n};
}

// Restriction of an energy to the weight-nbar shell: h = f on the shell,
// +inf elsewhere.
template <EnergyModel E>
class ShellEnergy {
 public:
  ShellEnergy(const E& base, int nbar) : base_(&base), nbar_(nbar) {}
  int size() const { return base_->size(); }
  double h(const Config& b) const { return b.weight() == nbar_ ? base_->h(b) : kInf; }

 private:
  const E* base_;
  int nbar_;
};

}  // namespace senselect

#endif  // SENSELECT_ENERGY_HPP
