#ifndef SENSELECT_GPL_HPP
#define SENSELECT_GPL_HPP

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "senselect/configuration.hpp"
#include "senselect/errors.hpp"
#include "senselect/gibbs.hpp"
#include "senselect/model.hpp"
#include "senselect/numeric.hpp"
#include "senselect/rng.hpp"

namespace senselect {

// s(t) = coef / t^exponent, defined for t >= 1.
struct PowerLaw {
  double coef;
  double exponent;
  double operator()(std::uint64_t t) const {
    return coef / std::pow(static_cast<double>(t), exponent);
  }
};

struct ScheduleQuadruple {
  PowerLaw a;  // f-table step
  PowerLaw b;  // lambda step
  PowerLaw c;  // theta step
  PowerLaw d;  // SPSA perturbation size
  std::uint64_t T = 1;
};

struct ScheduleIssue {
  std::string condition;
  std::string message;
};

// Checks the power-law step-size conditions. For s(t) = s0/t^p:
//   (i)   sum s(t) = inf            <=> p <= 1        (a, b, c)
//   (ii)  sum s(t)^2 < inf          <=> p > 0.5       (a, b, c)
//   (iii) d(t) -> 0                 <=> p_d > 0
//   (iv)  sum c(t)^2/d(t)^2 < inf   <=> 2(p_c - p_d) > 1
//   (v)   b/a -> 0 and c(floor(t/T))/b(t) -> 0  <=> p_b > p_a and p_c > p_b
inline std::vector<ScheduleIssue> validate_schedules(const ScheduleQuadruple& s) {
  std::vector<ScheduleIssue> issues;
  auto flag = [&](std::string cond, std::string msg) {
    issues.push_back({std::move(cond), std::move(msg)});
  };
  struct Named {
    const char* name;
    const PowerLaw* seq;
  };
  for (Named nm : {Named{"a", &s.a}, Named{"b", &s.b}, Named{"c", &s.c}, Named{"d", &s.d}}) {
    if (!(nm.seq->coef > 0.0))
      flag("domain", std::string(nm.name) + ": coefficient must be positive");
  }
  if (s.T < 1) flag("domain", "T must be a positive integer");
  for (Named nm : {Named{"a", &s.a}, Named{"b", &s.b}, Named{"c", &s.c}}) {
    if (!(nm.seq->exponent <= 1.0))
      flag("i", std::string(nm.name) + ": exponent > 1 makes the step summable");
    if (!(nm.seq->exponent > 0.5))
      flag("ii", std::string(nm.name) + ": exponent <= 0.5 is not square-summable");
  }
  if (!(s.d.exponent > 0.0)) flag("iii", "d: exponent <= 0 does not vanish");
  if (!(2.0 * (s.c.exponent - s.d.exponent) > 1.0))
    flag("iv", "c^2/d^2 not summable: need 2(p_c - p_d) > 1");
  if (!(s.b.exponent > s.a.exponent)) flag("v", "b/a does not vanish: need p_b > p_a");
  if (!(s.c.exponent > s.b.exponent))
    flag("v", "c(floor(t/T))/b(t) does not vanish: need p_c > p_b");
  return issues;
}

struct Interval {
  double lo;
  double hi;
};

// One projected SPSA ascent step on a log-likelihood callable taking the
// full parameter vector. Perturbed points are clamped into the box before
// evaluation; the divisor stays 2 d Delta_k even when a clamp binds.
template <class L>
std::vector<double> spsa_update(std::vector<double> theta, const L& loglik, double c_step,
                                double d_step, std::span<const Interval> box, Rng& rng) {
  const std::size_t dim = theta.size();
  if (box.size() != dim) throw DimensionMismatch("spsa_update: box size != dim");
  std::vector<double> delta(dim), plus(dim), minus(dim);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (std::size_t k = 0; k < dim; ++k) delta[k] = unif(rng) < 0.5 ? 1.0 : -1.0;
  for (std::size_t k = 0; k < dim; ++k) {
    plus[k] = clamp_to(theta[k] + d_step * delta[k], box[k].lo, box[k].hi);
    minus[k] = clamp_to(theta[k] - d_step * delta[k], box[k].lo, box[k].hi);
  }
  double diff = loglik(std::span<const double>(plus)) - loglik(std::span<const double>(minus));
  for (std::size_t k = 0; k < dim; ++k) {
    double grad_k = diff / (2.0 * d_step * delta[k]);
    theta[k] = clamp_to(theta[k] + c_step * grad_k, box[k].lo, box[k].hi);
  }
  return theta;
}

// f(B) <- clamp(f(B) + a_step (Y_B - f(B)), 0, A0) for every B, with
// Y_B the closed-form posterior variance under the current theta.
inline void fb_update_full(std::vector<double>& f_table, double theta, const SensorNoise& noise,
                           double a_step, double A0) {
  const int n = noise.size();
  for (std::uint64_t m = 0; m < f_table.size(); ++m) {
    double y = y_b_scalar(theta, noise, Config(n, m));
    f_table[m] = clamp_to(f_table[m] + a_step * (y - f_table[m]), 0.0, A0);
  }
}

// Low-complexity variant: only the visited entry moves, on its own visit
// clock nu_b.
inline void fb_update_low(std::vector<double>& f_table, const Config& b_t, double theta,
                          const SensorNoise& noise, std::vector<std::uint64_t>& nu_b,
                          const PowerLaw& a, double A0) {
  std::uint64_t m = b_t.mask();
  nu_b[m] += 1;
  double y = y_b_scalar(theta, noise, b_t);
  f_table[m] = clamp_to(f_table[m] + a(nu_b[m]) * (y - f_table[m]), 0.0, A0);
}

inline double lambda_update_gpl(double lambda, int weight, double b_step, double nbar,
                                double A0) {
  return clamp_to(lambda + b_step * (weight - nbar), 0.0, A0);
}

enum class GplVariant { Full, LowComplexity };

struct GplConfig {
  ScheduleQuadruple schedules;
  double beta = 1000.0;
  double nbar = 4.0;
  double A0 = 2.0;
  double theta_lo = 0.0;
  double theta_hi = 0.8;
  double theta_init = 0.2;
  double lambda0 = 0.05;
  int sweeps_per_slot = 10;
  std::uint64_t horizon = 0;
  GplVariant variant = GplVariant::Full;
  bool learn_theta = true;  // pinned theta when false

  void validate() const {
    auto issues = validate_schedules(schedules);
    if (!issues.empty()) {
      std::string msg = "GplConfig: step-size conditions violated:";
      for (const auto& i : issues) msg += " (" + i.condition + ") " + i.message + ";";
      throw ConfigError(msg);
    }
    if (!(beta > 0.0)) throw ConfigError("GplConfig: beta must be > 0");
    if (!(A0 > 0.0)) throw ConfigError("GplConfig: A0 must be > 0");
    if (!(theta_lo <= theta_init && theta_init <= theta_hi && theta_hi < 1.0))
      throw ConfigError("GplConfig: need theta_lo <= theta_init <= theta_hi < 1");
    if (sweeps_per_slot < 1) throw ConfigError("GplConfig: sweeps_per_slot must be >= 1");
    // every posterior variance is at most the prior variance, which is
    // largest at theta_lo
    if (!(square(1.0 - theta_lo) < A0))
      throw ConfigError("GplConfig: A0 must exceed the largest prior variance (1-theta_lo)^2");
  }
};

struct GplState {
  GibbsChainState chain;
  double lambda;
  double theta;
  std::vector<double> f_table;
  std::vector<std::uint64_t> nu_b;  // per-configuration visit clocks (GPL-L)
  std::uint64_t nu = 0;             // full-read clock
  std::uint64_t t = 0;              // slots completed
};

// Hidden process the fusion center tracks: theta0 is unknown to the algorithm.
struct ScalarTruth {
  double theta0;
  SensorNoise noise;
};

inline GplState make_gpl_state(const GplConfig& cfg, int n) {
  if (n > 20) throw TooLarge("make_gpl_state: f-table enumeration limited to n <= 20");
  GplState st;
  st.chain = GibbsChainState{Config(n), cfg.beta, 0};
  st.lambda = cfg.lambda0;
  st.theta = cfg.theta_init;
  st.f_table.assign(config_count(n), square(1.0 - cfg.theta_init));
  st.nu_b.assign(config_count(n), 0);
  return st;
}

struct GplSlotRecord {
  std::uint64_t t;
  Config b;
  double squared_error;
  double lambda;
  double theta;
  bool full_read;
};

// One GPL slot at time t >= 1. Full-read slots are t = 1, T+1, 2T+1, ...
// Order within a slot follows the four algorithm steps: Gibbs sweeps and
// estimation; f-table update; theta update; lambda update.
inline GplSlotRecord gpl_slot(GplState& st, const GplConfig& cfg, const ScalarTruth& truth,
                              Rng& rng) {
  const int n = truth.noise.size();
  const std::uint64_t t = ++st.t;
  const bool full_read = ((t - 1) % cfg.schedules.T) == 0;

  // (1) sensor activation and process estimation under h(B) = f(B) + lambda|B|
  auto f_view = [&st](const Config& b) { return st.f_table[b.mask()]; };
  auto h_now = mse_energy(f_view, st.lambda, n);
  st.chain.beta = cfg.beta;
  for (int sweep = 0; sweep < cfg.sweeps_per_slot; ++sweep)
    st.chain = bg_step(st.chain, h_now, rng);
  const Config b_t = st.chain.current;

  ScalarParametricPrior hidden{truth.theta0, 0.0, truth.theta0};
  ScalarDraw draw = sample_slot(hidden, truth.noise, Config::all_on(n), rng);

  std::vector<double> z_active;
  z_active.reserve(static_cast<std::size_t>(b_t.weight()));
  for (int k = 0; k < n; ++k)
    if (b_t.test(k)) z_active.push_back(draw.z[static_cast<std::size_t>(k)]);
  Posterior post = posterior_scalar(st.theta, truth.noise, b_t, z_active);
  const double sq_err = square(draw.x - post.mean);

  if (full_read) {
    st.nu += 1;

    // (2) MSE table refresh
    if (cfg.variant == GplVariant::Full) {
      fb_update_full(st.f_table, st.theta, truth.noise, cfg.schedules.a(st.nu), cfg.A0);
    } else {
      fb_update_low(st.f_table, b_t, st.theta, truth.noise, st.nu_b, cfg.schedules.a, cfg.A0);
    }

    // (3) SPSA theta step; GPL-L only sees the sensors the slot activated
    if (cfg.learn_theta) {
      const Config read = cfg.variant == GplVariant::Full ? Config::all_on(n) : b_t;
      if (read.weight() > 0) {
        Interval box{cfg.theta_lo, cfg.theta_hi};
        auto loglik = [&](std::span<const double> th) {
          return loglik_subset(draw.z, read, th[0], truth.noise);
        };
        std::vector<double> th =
            spsa_update(std::vector<double>{st.theta}, loglik, cfg.schedules.c(st.nu),
                        cfg.schedules.d(st.nu), std::span<const Interval>(&box, 1), rng);
        st.theta = th[0];
      }
    }
  }

  // (4) multiplier step driven by the slot's own weight
  st.lambda = lambda_update_gpl(st.lambda, b_t.weight(), cfg.schedules.b(t), cfg.nbar, cfg.A0);

  return GplSlotRecord{t, b_t, sq_err, st.lambda, st.theta, full_read};
}

struct GplRun {
  std::vector<GplSlotRecord> records;
  GplState final_state;
  std::uint64_t full_reads = 0;
};

inline GplRun run_gpl(const GplConfig& cfg, const ScalarTruth& truth, Rng& rng) {
  cfg.validate();
  truth.noise.validate(truth.noise.size());
  GplRun out;
  out.records.reserve(cfg.horizon);
  GplState st = make_gpl_state(cfg, truth.noise.size());
  for (std::uint64_t t = 1; t <= cfg.horizon; ++t) {
    out.records.push_back(gpl_slot(st, cfg, truth, rng));
    if (out.records.back().full_read) ++out.full_reads;
  }
  out.final_state = std::move(st);
  return out;
}

struct MonteCarloEstimate {
  double mean;
  double std_error;
};

// Monte-Carlo estimate of g(theta) = E log p(Z | theta) with X ~ p_theta0 and
// all sensors read.
inline MonteCarloEstimate g_theta_estimate(double theta, double theta0, const SensorNoise& noise,
                                           std::uint64_t samples, Rng& rng) {
  if (samples < 1) throw ConfigError("g_theta_estimate: samples must be >= 1");
  const int n = noise.size();
  ScalarParametricPrior hidden{theta0, 0.0, theta0};
  double sum = 0.0, sum_sq = 0.0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    ScalarDraw draw = sample_slot(hidden, noise, Config::all_on(n), rng);
    double ll = loglik_full(draw.z, theta, noise);
    sum += ll;
    sum_sq += ll * ll;
  }
  double mean = sum / static_cast<double>(samples);
  double var = std::max(0.0, sum_sq / static_cast<double>(samples) - mean * mean);
  return MonteCarloEstimate{mean, std::sqrt(var / static_cast<double>(samples))};
}

}  // namespace senselect

#endif  // SENSELECT_GPL_HPP
