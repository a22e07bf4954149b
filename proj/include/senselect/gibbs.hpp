#ifndef SENSELECT_GIBBS_HPP
#define SENSELECT_GIBBS_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "senselect/configuration.hpp"
#include "senselect/energy.hpp"
#include "senselect/errors.hpp"
#include "senselect/numeric.hpp"
#include "senselect/rng.hpp"

namespace senselect {

// P(bit on) = e^{-beta h_on} / (e^{-beta h_on} + e^{-beta h_off}),
// evaluated in log space. An infinite energy forbids that branch.
inline double flip_probability(double h_on, double h_off, double beta) {
  const bool on_inf = std::isinf(h_on), off_inf = std::isinf(h_off);
  if (on_inf && off_inf) throw InvalidEnergy("flip_probability: both energies infinite");
  if (off_inf) return 1.0;
  if (on_inf) return 0.0;
  return 1.0 / (1.0 + std::exp(-beta * (h_off - h_on)));
}

struct GibbsChainState {
  Config current;
  double beta = 1.0;
  std::uint64_t step_count = 0;
};

// One single-site update: j_t uniform, bit j_t resampled from the
// conditional, all other bits copied.
template <EnergyModel E>
GibbsChainState bg_step(GibbsChainState state, const E& energy, Rng& rng) {
  const int n = state.current.size();
  int j = std::uniform_int_distribution<int>(0, n - 1)(rng);
  double h_on = energy.h(state.current.with(j, true));
  double h_off = energy.h(state.current.with(j, false));
  double p = flip_probability(h_on, h_off, state.beta);
  bool on = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
  state.current = state.current.with(j, on);
  ++state.step_count;
  return state;
}

// Logarithmic annealing beta(t) = beta0 log(1+t). The schedule is admissible
// only while beta0 * N * Delta < 1, with Delta the energy range.
struct AnnealingSchedule {
  double beta0;
  std::optional<double> delta;  // max |h(B) - h(A)|; enumerated when absent

  double beta_at(std::uint64_t t) const {
    return beta0 * std::log(1.0 + static_cast<double>(t));
  }
};

template <EnergyModel E>
double energy_range(const E& energy, int n) {
  const std::uint64_t count = config_count(n);
  double lo = kInf, hi = -kInf;
  for (std::uint64_t m = 0; m < count; ++m) {
    double h = energy.h(Config(n, m));
    lo = std::min(lo, h);
    hi = std::max(hi, h);
  }
  return hi - lo;
}

// Runs the annealed chain for `horizon` steps and returns all visited
// configurations, starting state included.
template <EnergyModel E>
std::vector<Config> abg_run(const E& energy, const AnnealingSchedule& schedule, Config start,
                            std::uint64_t horizon, Rng& rng) {
  const int n = start.size();
  double delta = schedule.delta ? *schedule.delta : energy_range(energy, n);
  if (!(schedule.beta0 * n * delta < 1.0))
    throw ScheduleViolation("abg_run: beta0 * N * Delta must be < 1");
  std::vector<Config> trajectory;
  trajectory.reserve(horizon + 1);
  trajectory.push_back(start);
  GibbsChainState state{start, schedule.beta_at(1), 0};
  for (std::uint64_t t = 1; t <= horizon; ++t) {
    state.beta = schedule.beta_at(t);
    state = bg_step(state, energy, rng);
    trajectory.push_back(state.current);
  }
  return trajectory;
}

// Pair-swap kernel on the weight-nbar shell: propose exchanging one active
// and one inactive sensor, accept with the two-state Gibbs probability.
// Weight is preserved exactly. Single-bit flips all leave the shell, so the
// flip chain would be frozen there; the swap chain is irreducible on the
// shell and keeps the shell-restricted pi_beta stationary.
template <EnergyModel E>
GibbsChainState swap_step_hard(GibbsChainState state, const E& energy, int nbar, Rng& rng) {
  const int n = state.current.size();
  if (state.current.weight() != nbar)
    throw WeightViolation("swap_step_hard: |B| != nbar");
  ++state.step_count;
  if (nbar == 0 || nbar == n) return state;  // no legal swap

  std::vector<int> active, inactive;
  active.reserve(static_cast<std::size_t>(nbar));
  inactive.reserve(static_cast<std::size_t>(n - nbar));
  for (int k = 0; k < n; ++k) (state.current.test(k) ? active : inactive).push_back(k);

  int i = active[static_cast<std::size_t>(
      std::uniform_int_distribution<int>(0, nbar - 1)(rng))];
  int j = inactive[static_cast<std::size_t>(
      std::uniform_int_distribution<int>(0, n - nbar - 1)(rng))];
  Config proposal = state.current.with(i, false).with(j, true);
  double p = flip_probability(energy.h(proposal), energy.h(state.current), state.beta);
  if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p) state.current = proposal;
  return state;
}

}  // namespace senselect

#endif  // SENSELECT_GIBBS_HPP
