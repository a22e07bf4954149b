#ifndef SENSELECT_CONSTRAINED_HPP
#define SENSELECT_CONSTRAINED_HPP

#include <cmath>
#include <utility>
#include <vector>

#include "senselect/analysis.hpp"
#include "senselect/configuration.hpp"
#include "senselect/energy.hpp"
#include "senselect/errors.hpp"
#include "senselect/gibbs.hpp"
#include "senselect/numeric.hpp"
#include "senselect/rng.hpp"

namespace senselect {

struct GlConfig {
  double beta;
  double nbar;           // mean-activation budget in (0, N)
  double a0 = 1.0;       // step a(t) = a0 / t^a_exp
  double a_exp = 1.0;
  double lambda_lo = 0.0;  // projection bounds b < c
  double lambda_hi;
  double lambda0;
  std::uint64_t horizon = 0;

  double step(std::uint64_t t) const {
    return a0 / std::pow(static_cast<double>(t), a_exp);
  }

  void validate() const {
    if (!(beta > 0.0)) throw ConfigError("GlConfig: beta must be > 0");
    if (!(a0 > 0.0)) throw ConfigError("GlConfig: a0 must be > 0");
    if (!(a_exp > 0.5 && a_exp <= 1.0))
      throw ConfigError("GlConfig: a_exp must lie in (0.5, 1] for a square-summable, non-summable step");
    if (!(lambda_lo >= 0.0 && lambda_lo < lambda_hi))
      throw ConfigError("GlConfig: need 0 <= lambda_lo < lambda_hi");
    if (lambda0 < lambda_lo || lambda0 > lambda_hi)
      throw ConfigError("GlConfig: lambda0 outside projection bounds");
  }
};

struct GlState {
  GibbsChainState chain;
  double lambda;
  int prev_weight;  // |B(t-1)|, the weight the slot started from
};

// One GL slot at time t >= 1: a BG update against h_lambda(B) = f(B) +
// lambda(t) |B|, then the projected multiplier update driven by the weight
// the slot started from.
template <class F>
GlState gl_step(GlState state, const F& mse, const GlConfig& cfg, std::uint64_t t, Rng& rng) {
  state.prev_weight = state.chain.current.weight();
  auto energy = mse_energy(mse, state.lambda, state.chain.current.size());
  state.chain.beta = cfg.beta;
  state.chain = bg_step(state.chain, energy, rng);
  state.lambda = clamp_to(state.lambda + cfg.step(t) * (state.prev_weight - cfg.nbar),
                          cfg.lambda_lo, cfg.lambda_hi);
  return state;
}

struct GlRun {
  std::vector<Config> trajectory;  // B(1)..B(horizon)
  std::vector<double> lambdas;     // lambda after each slot's update
  GlState final_state;
};

template <class F>
GlRun run_gl(const F& mse, const GlConfig& cfg, Config start, Rng& rng) {
  cfg.validate();
  GlRun out;
  out.trajectory.reserve(cfg.horizon);
  out.lambdas.reserve(cfg.horizon);
  GlState state{GibbsChainState{start, cfg.beta, 0}, cfg.lambda0, start.weight()};
  for (std::uint64_t t = 1; t <= cfg.horizon; ++t) {
    state = gl_step(state, mse, cfg, t, rng);
    out.trajectory.push_back(state.chain.current);
    out.lambdas.push_back(state.lambda);
  }
  out.final_state = state;
  return out;
}

// g(lambda) = E_{pi_beta,lambda} |B|, by exact enumeration.
template <class F>
double gibbs_mean_weight(const F& mse, double beta, double lambda, int n) {
  auto energy = mse_energy(mse, lambda, n);
  ExactDistribution pi = exact_gibbs_distribution(energy, beta, n);
  return expectation(pi, [](const Config& b) { return static_cast<double>(b.weight()); });
}

struct LambdaStar {
  double lambda;
  double g_value;        // g(lambda) at the returned multiplier
  double bracket_width;  // final bisection bracket
};

// Bisection for g(lambda*) = nbar. g is continuous and decreasing in lambda,
// so a bracket [0, hi] with g(hi) <= nbar suffices; hi is found by doubling.
template <class F>
LambdaStar solve_lambda_star(const F& mse, double beta, double nbar, int n, double tol = 1e-6) {
  if (!(tol > 0.0)) throw ConfigError("solve_lambda_star: tol must be > 0");
  double g0 = gibbs_mean_weight(mse, beta, 0.0, n);
  if (g0 < nbar) throw Infeasible("solve_lambda_star: nbar exceeds g(0)");
  if (std::abs(g0 - nbar) <= tol) return LambdaStar{0.0, g0, 0.0};

  double lo = 0.0, hi = 1.0;
  int doublings = 0;
  while (gibbs_mean_weight(mse, beta, hi, n) > nbar) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > 80) throw Infeasible("solve_lambda_star: no upper bracket found");
  }
  double g_mid = 0.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    g_mid = gibbs_mean_weight(mse, beta, mid, n);
    if (std::abs(g_mid - nbar) <= tol) return LambdaStar{mid, g_mid, hi - lo};
    (g_mid > nbar ? lo : hi) = mid;
  }
  return LambdaStar{0.5 * (lo + hi), g_mid, hi - lo};
}

// Certificate that some pmf over the argmin set of h_lambda meets the budget:
// either a single minimizer of weight nbar, or a two-point mixture.
struct BudgetCertificate {
  bool certified = false;
  std::vector<std::pair<Config, double>> mixture;  // (configuration, probability)
};

template <class F>
BudgetCertificate budget_certificate(const F& mse, double lambda_star, double nbar, int n,
                                     double tie_tol = 1e-9) {
  auto energy = mse_energy(mse, lambda_star, n);
  std::vector<Config> mins = exact_argmin(energy, n, tie_tol);

  BudgetCertificate out;
  // heaviest minimizer not above the budget, lightest not below
  const Config* lo = nullptr;
  const Config* hi = nullptr;
  for (const Config& b : mins) {
    double w = b.weight();
    if (w <= nbar && (!lo || b.weight() > lo->weight())) lo = &b;
    if (w >= nbar && (!hi || b.weight() < hi->weight())) hi = &b;
  }
  if (!lo || !hi) return out;  // budget outside the argmin weight range
  out.certified = true;
  if (lo->weight() == hi->weight() || std::abs(lo->weight() - nbar) < 1e-12) {
    out.mixture = {{*lo, 1.0}};
    return out;
  }
  double p = (hi->weight() - nbar) / static_cast<double>(hi->weight() - lo->weight());
  out.mixture = {{*lo, p}, {*hi, 1.0 - p}};
  return out;
}

}  // namespace senselect

#endif  // SENSELECT_CONSTRAINED_HPP
