#ifndef SENSELECT_ANALYSIS_HPP
#define SENSELECT_ANALYSIS_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "senselect/configuration.hpp"
#include "senselect/energy.hpp"
#include "senselect/errors.hpp"
#include "senselect/gibbs.hpp"
#include "senselect/numeric.hpp"

namespace senselect {

// A distribution over {0,1}^N, indexed by configuration mask.
struct ExactDistribution {
  int n = 1;
  Eigen::VectorXd probs;

  double prob(const Config& b) const { return probs(static_cast<Eigen::Index>(b.mask())); }

  void validate() const {
    if (probs.size() != static_cast<Eigen::Index>(1ULL << n))
      throw DimensionMismatch("ExactDistribution: size != 2^n");
    if (probs.minCoeff() < 0.0) throw NumericalError("ExactDistribution: negative mass");
    if (std::abs(probs.sum() - 1.0) > 1e-10)
      throw NumericalError("ExactDistribution: does not sum to 1");
  }
};

// pi_beta(B) = e^{-beta h(B)} / Z_beta by full enumeration, normalized with
// log-sum-exp so that beta in the thousands stays finite.
template <EnergyModel E>
ExactDistribution exact_gibbs_distribution(const E& energy, double beta, int n) {
  if (n > 20) throw TooLarge("exact_gibbs_distribution: n > 20");
  const std::uint64_t count = config_count(n);
  std::vector<double> logw(count);
  for (std::uint64_t m = 0; m < count; ++m) logw[m] = -beta * energy.h(Config(n, m));
  double logz = log_sum_exp(logw);
  if (!std::isfinite(logz))
    throw InvalidEnergy("exact_gibbs_distribution: all energies infinite");
  ExactDistribution out;
  out.n = n;
  out.probs.resize(static_cast<Eigen::Index>(count));
  for (std::uint64_t m = 0; m < count; ++m)
    out.probs(static_cast<Eigen::Index>(m)) = std::exp(logw[m] - logz);
  return out;
}

// Exact one-step BG kernel. Row B: mass (1/N) * flip_probability toward each
// single-bit neighbor, remainder on the diagonal.
template <EnergyModel E>
Eigen::MatrixXd bg_transition_matrix(const E& energy, double beta, int n) {
  if (n > 12) throw TooLarge("bg_transition_matrix: n > 12");
  const std::uint64_t count = config_count(n);
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(count),
                                            static_cast<Eigen::Index>(count));
  const double inv_n = 1.0 / n;
  for (std::uint64_t m = 0; m < count; ++m) {
    Config b(n, m);
    for (int j = 0; j < n; ++j) {
      Config on = b.with(j, true), off = b.with(j, false);
      double p_on = flip_probability(energy.h(on), energy.h(off), beta);
      P(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(on.mask())) += inv_n * p_on;
      P(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(off.mask())) +=
          inv_n * (1.0 - p_on);
    }
  }
  return P;
}

// Dobrushin ergodic coefficient delta(P) = 1 - min_{i,j} sum_k min(P_ik, P_jk).
inline double dobrushin_coefficient(const Eigen::MatrixXd& P) {
  const Eigen::Index s = P.rows();
  if (P.cols() != s) throw DimensionMismatch("dobrushin_coefficient: not square");
  for (Eigen::Index i = 0; i < s; ++i)
    if (std::abs(P.row(i).sum() - 1.0) > 1e-9 || P.row(i).minCoeff() < -1e-12)
      throw NotStochastic("dobrushin_coefficient: rows must be stochastic");
  double min_overlap = kInf;
  for (Eigen::Index i = 0; i < s; ++i)
    for (Eigen::Index j = i + 1; j < s; ++j)
      min_overlap = std::min(min_overlap, P.row(i).cwiseMin(P.row(j)).sum());
  if (s == 1) min_overlap = 1.0;
  return 1.0 - min_overlap;
}

inline double tv_distance(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  if (p.size() != q.size()) throw DimensionMismatch("tv_distance: sizes differ");
  return 0.5 * (p - q).cwiseAbs().sum();
}

inline double tv_distance(const ExactDistribution& p, const ExactDistribution& q) {
  return tv_distance(p.probs, q.probs);
}

// Contraction factor from the Dobrushin bound on the N-step subsampled BG
// chain: (1 - e^{-beta N Delta} / N^N)^l.
inline double mixing_bound(double beta, int n, double delta, long l) {
  if (l < 0 || delta < 0.0) throw ConfigError("mixing_bound: need l >= 0, Delta >= 0");
  double log_term = -beta * n * delta - n * std::log(static_cast<double>(n));
  double factor = 1.0 - std::exp(log_term);
  return std::pow(factor, static_cast<double>(l));
}

// Lower bound on the mass of a unique minimizer:
// pi_beta(B*) >= 1 / (1 + (2^N - 1) e^{-beta Delta1}).
inline double mode_mass_bound(double beta, int n, double delta1) {
  if (!(delta1 > 0.0)) throw ConfigError("mode_mass_bound: Delta1 must be > 0");
  double tail = (std::pow(2.0, n) - 1.0) * std::exp(-beta * delta1);
  return 1.0 / (1.0 + tail);
}

// Normalized visit counts after burn_in (entries with index >= burn_in).
inline ExactDistribution empirical_distribution(std::span<const Config> trajectory,
                                                std::size_t burn_in) {
  if (burn_in >= trajectory.size())
    throw EmptyWindow("empirical_distribution: burn_in >= trajectory length");
  const int n = trajectory[burn_in].size();
  ExactDistribution out;
  out.n = n;
  out.probs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(config_count(n)));
  for (std::size_t i = burn_in; i < trajectory.size(); ++i)
    out.probs(static_cast<Eigen::Index>(trajectory[i].mask())) += 1.0;
  out.probs /= out.probs.sum();
  return out;
}

inline double expectation(const ExactDistribution& dist,
                          const std::function<double(const Config&)>& fn) {
  double acc = 0.0;
  for (Eigen::Index m = 0; m < dist.probs.size(); ++m)
    acc += dist.probs(m) * fn(Config(dist.n, static_cast<std::uint64_t>(m)));
  return acc;
}

// All minimizers of h within tie tolerance.
template <EnergyModel E>
std::vector<Config> exact_argmin(const E& energy, int n, double tie_tol = 0.0) {
  const std::uint64_t count = config_count(n);
  double best = kInf;
  for (std::uint64_t m = 0; m < count; ++m)
    best = std::min(best, energy.h(Config(n, m)));
  std::vector<Config> mins;
  for (std::uint64_t m = 0; m < count; ++m) {
    Config b(n, m);
    if (energy.h(b) <= best + tie_tol) mins.push_back(b);
  }
  return mins;
}

// Delta1: gap between the minimum energy and the smallest strictly larger one.
template <EnergyModel E>
double minimizer_gap(const E& energy, int n) {
  const std::uint64_t count = config_count(n);
  double best = kInf, second = kInf;
  for (std::uint64_t m = 0; m < count; ++m) {
    double h = energy.h(Config(n, m));
    if (h < best) {
      second = best;
      best = h;
    } else if (h > best) {
      second = std::min(second, h);
    }
  }
  return second - best;
}

}  // namespace senselect

#endif  // SENSELECT_ANALYSIS_HPP
