#ifndef SENSELECT_RUNNER_HPP
#define SENSELECT_RUNNER_HPP

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "senselect/analysis.hpp"
#include "senselect/baselines.hpp"
#include "senselect/configuration.hpp"
#include "senselect/constrained.hpp"
#include "senselect/csv.hpp"
#include "senselect/energy.hpp"
#include "senselect/errors.hpp"
#include "senselect/experiment.hpp"
#include "senselect/gibbs.hpp"
#include "senselect/gpl.hpp"
#include "senselect/model.hpp"
#include "senselect/rng.hpp"

namespace senselect {

// A concrete model instance, deterministically derived from the config's
// model seeds.
struct Instance {
  ModelKind kind;
  VectorGaussianPrior prior;  // vector model
  SensorNoise noise;          // scalar model
  double theta0 = 0.5;
  std::vector<double> f_exact;  // exact MSE per mask (n <= 20)

  int n() const {
    return kind == ModelKind::Vector ? prior.dim() : noise.size();
  }

  MseFn mse() const {
    if (kind == ModelKind::Vector) {
      if (!f_exact.empty()) {
        const std::vector<double>* tab = &f_exact;
        return [tab](const Config& b) { return (*tab)[b.mask()]; };
      }
      const VectorGaussianPrior* p = &prior;
      return [p](const Config& b) { return mse_subset_vector(*p, b); };
    }
    const SensorNoise* nz = &noise;
    double th = theta0;
    return [nz, th](const Config& b) { return y_b_scalar(th, *nz, b); };
  }
};

inline Instance build_instance(const ExperimentConfig& cfg) {
  Instance inst;
  inst.kind = cfg.model;
  if (cfg.model == ModelKind::Vector) {
    Rng rng = make_rng(cfg.cov_seed);
    inst.prior.covariance = generate_covariance(cfg.n, rng);
    inst.prior.mean = Eigen::VectorXd::Zero(cfg.n);
    inst.prior.validate();
  } else {
    Rng rng = make_rng(cfg.noise_seed);
    std::uniform_real_distribution<double> unif(0.0, cfg.sigma_max);
    inst.noise.sigmas.resize(static_cast<std::size_t>(cfg.n));
    for (double& s : inst.noise.sigmas) s = unif(rng);
    inst.noise.validate(cfg.n);
    inst.theta0 = cfg.theta0;
  }
  if (cfg.n <= 20) {
    MseFn f = inst.mse();  // lazy path while f_exact is still empty
    std::vector<double> table(config_count(cfg.n));
    for (std::uint64_t m = 0; m < table.size(); ++m) table[m] = f(Config(cfg.n, m));
    inst.f_exact = std::move(table);
  }
  return inst;
}

struct SummaryRow {
  int replication;
  double time_avg_mse = 0.0;
  double time_avg_weight = 0.0;
  double terminal_lambda = 0.0;
  double terminal_theta = 0.0;
  double runtime_seconds = 0.0;
};

namespace detail {

// Per-replication CSV buffers plus running statistics.
class SlotSink {
 public:
  SlotSink(int replication, std::uint64_t log_every, bool want_trace)
      : rep_(replication), log_every_(log_every), trace_(want_trace) {}

  void consume(std::uint64_t t, int weight, double sq_err, double lambda, double theta,
               bool full_read) {
    slots_ << rep_ << ',' << t << ',' << weight << ',' << format_double(sq_err) << ','
           << format_double(lambda) << ',' << format_double(theta) << ','
           << (full_read ? 1 : 0) << '\n';
    sum_err_ += sq_err;
    sum_weight_ += weight;
    ++count_;
    last_lambda_ = lambda;
    last_theta_ = theta;
    if (trace_ && (t % log_every_ == 0)) {
      trace_rows_ << t << ',' << format_double(sum_err_ / static_cast<double>(count_)) << ','
                  << format_double(sum_weight_ / static_cast<double>(count_)) << ','
                  << format_double(lambda) << ',' << format_double(theta) << '\n';
    }
  }

  SummaryRow summary() const {
    SummaryRow s;
    s.replication = rep_;
    s.time_avg_mse = count_ ? sum_err_ / static_cast<double>(count_) : 0.0;
    s.time_avg_weight = count_ ? sum_weight_ / static_cast<double>(count_) : 0.0;
    s.terminal_lambda = last_lambda_;
    s.terminal_theta = last_theta_;
    return s;
  }

  std::string slot_rows() const { return slots_.str(); }
  std::string trace_rows() const { return trace_rows_.str(); }

 private:
  int rep_;
  std::uint64_t log_every_;
  bool trace_;
  std::ostringstream slots_;
  std::ostringstream trace_rows_;
  double sum_err_ = 0.0;
  double sum_weight_ = 0.0;
  std::uint64_t count_ = 0;
  double last_lambda_ = 0.0;
  double last_theta_ = 0.0;
};

inline void simulate_replication(const ExperimentConfig& cfg, const Instance& inst, int rep,
                                 SlotSink& sink) {
  Rng rng = make_replication_rng(cfg.seed, static_cast<std::uint64_t>(rep));
  const int n = cfg.n;
  MseFn f = inst.mse();

  switch (cfg.algorithm) {
    case Algorithm::Bg: {
      auto energy = mse_energy(f, cfg.lambda, n);
      GibbsChainState st{Config(n), cfg.beta, 0};
      for (std::uint64_t t = 1; t <= cfg.horizon; ++t) {
        for (int s = 0; s < cfg.sweeps_per_slot; ++s) st = bg_step(st, energy, rng);
        sink.consume(t, st.current.weight(), f(st.current), cfg.lambda, 0.0, false);
      }
      break;
    }
    case Algorithm::Abg: {
      auto energy = mse_energy(f, cfg.lambda, n);
      AnnealingSchedule schedule{cfg.beta0, {}};
      if (n <= 20) {
        double delta = energy_range(energy, n);
        if (!(cfg.beta0 * n * delta < 1.0))
          throw ScheduleViolation("abg: beta0 * N * Delta >= 1 for this instance");
        schedule.delta = delta;
      }
      GibbsChainState st{Config(n), schedule.beta_at(1), 0};
      for (std::uint64_t t = 1; t <= cfg.horizon; ++t) {
        st.beta = schedule.beta_at(t);
        st = bg_step(st, energy, rng);
        sink.consume(t, st.current.weight(), f(st.current), cfg.lambda, 0.0, false);
      }
      break;
    }
    case Algorithm::Gl: {
      GlConfig gl{cfg.beta, cfg.nbar,      cfg.gl_a0,   cfg.gl_a_exp,
                  cfg.lambda_lo, cfg.lambda_hi, cfg.lambda0, cfg.horizon};
      gl.validate();
      GlState st{GibbsChainState{Config(n), cfg.beta, 0}, cfg.lambda0, 0};
      for (std::uint64_t t = 1; t <= cfg.horizon; ++t) {
        st = gl_step(st, f, gl, t, rng);
        sink.consume(t, st.chain.current.weight(), f(st.chain.current), st.lambda, 0.0, false);
      }
      break;
    }
    case Algorithm::HardShell: {
      int nbar = static_cast<int>(cfg.nbar);
      auto energy = mse_energy(f, 0.0, n);
      Config start(n, nbar == 0 ? 0 : ((1ULL << nbar) - 1));
      GibbsChainState st{start, cfg.beta, 0};
      for (std::uint64_t t = 1; t <= cfg.horizon; ++t) {
        for (int s = 0; s < cfg.sweeps_per_slot; ++s)
          st = swap_step_hard(st, energy, nbar, rng);
        sink.consume(t, nbar, f(st.current), 0.0, 0.0, false);
      }
      break;
    }
    case Algorithm::Gpl:
    case Algorithm::GplLow: {
      GplConfig g = cfg.gpl_config();
      ScalarTruth truth{inst.theta0, inst.noise};
      GplState st = make_gpl_state(g, n);
      for (std::uint64_t t = 1; t <= cfg.horizon; ++t) {
        GplSlotRecord rec = gpl_slot(st, g, truth, rng);
        sink.consume(rec.t, rec.b.weight(), rec.squared_error, rec.lambda, rec.theta,
                     rec.full_read);
      }
      break;
    }
    default:
      throw ConfigError("simulate_replication: not a slot-simulation algorithm");
  }
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

}  // namespace detail

// Resolves constraint.nbar_from_lambda via the exact oracle; for enumerable
// instances also checks that lambda* lies strictly inside the projection
// window and warns otherwise.
inline ExperimentConfig resolve_constraint(const ExperimentConfig& cfg, const Instance& inst) {
  ExperimentConfig out = cfg;
  if (cfg.algorithm != Algorithm::Gl) return out;
  MseFn f = inst.mse();
  if (cfg.nbar_from_lambda >= 0.0) {
    if (cfg.n > 20) throw TooLarge("constraint.nbar_from_lambda needs n <= 20");
    out.nbar = gibbs_mean_weight(f, cfg.beta, cfg.nbar_from_lambda, cfg.n);
  }
  if (cfg.n <= 20) {
    LambdaStar ls = solve_lambda_star(f, cfg.beta, out.nbar, cfg.n);
    if (!(ls.lambda > out.lambda_lo && ls.lambda < out.lambda_hi))
      std::cerr << "warning: lambda* = " << ls.lambda
                << " is not inside (lambda_lo, lambda_hi); the GL projection will bind\n";
  }
  return out;
}

struct RunResult {
  std::vector<SummaryRow> summaries;
  std::vector<std::filesystem::path> files;
};

inline RunResult run_slot_experiment(const ExperimentConfig& cfg0, const Instance& inst) {
  ExperimentConfig cfg = resolve_constraint(cfg0, inst);
  const int reps = cfg.replications;
  std::vector<detail::SlotSink> sinks;
  sinks.reserve(static_cast<std::size_t>(reps));
  for (int r = 0; r < reps; ++r) sinks.emplace_back(r, cfg.log_every, r == 0);
  std::vector<double> runtimes(static_cast<std::size_t>(reps), 0.0);

  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(reps));
  auto worker = [&]() {
    for (;;) {
      int r = next.fetch_add(1);
      if (r >= reps) return;
      try {
        auto t0 = std::chrono::steady_clock::now();
        detail::simulate_replication(cfg, inst, r, sinks[static_cast<std::size_t>(r)]);
        runtimes[static_cast<std::size_t>(r)] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      } catch (...) {
        errors[static_cast<std::size_t>(r)] = std::current_exception();
      }
    }
  };
  int nthreads = std::min(cfg.threads, reps);
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::filesystem::create_directories(cfg.out_dir);
  RunResult result;

  {
    std::ostringstream slots;
    CsvWriter w(slots, "slots/1",
                {"replication", "t", "weight", "squared_error", "lambda", "theta", "J"});
    for (auto& s : sinks) slots << s.slot_rows();
    std::filesystem::path p = std::filesystem::path(cfg.out_dir) / "slots.csv";
    detail::write_text(p, slots.str());
    result.files.push_back(p);
  }
  {
    std::ostringstream trace;
    CsvWriter w(trace, "trace/1", {"t", "mse_avg", "weight_avg", "lambda", "theta"});
    trace << sinks[0].trace_rows();
    std::filesystem::path p = std::filesystem::path(cfg.out_dir) / "trace.csv";
    detail::write_text(p, trace.str());
    result.files.push_back(p);
  }
  {
    std::ostringstream sum;
    std::vector<std::string> cols{"replication", "time_avg_mse", "time_avg_weight",
                                  "terminal_lambda", "terminal_theta"};
    if (cfg.timings) cols.push_back("runtime_seconds");
    CsvWriter w(sum, "summary/1", cols);
    for (int r = 0; r < reps; ++r) {
      SummaryRow s = sinks[static_cast<std::size_t>(r)].summary();
      s.runtime_seconds = runtimes[static_cast<std::size_t>(r)];
      result.summaries.push_back(s);
      auto row = w.row();
      row.col(s.replication)
          .col(s.time_avg_mse)
          .col(s.time_avg_weight)
          .col(s.terminal_lambda)
          .col(s.terminal_theta);
      if (cfg.timings) row.col(s.runtime_seconds);
    }
    std::filesystem::path p = std::filesystem::path(cfg.out_dir) / "summary.csv";
    detail::write_text(p, sum.str());
    result.files.push_back(p);
  }
  return result;
}

inline RunResult run_baseline_experiment(const ExperimentConfig& cfg, const Instance& inst) {
  MseFn f = inst.mse();
  BaselineResult res;
  switch (cfg.algorithm) {
    case Algorithm::Greedy1: res = greedy1(f, cfg.lambda, cfg.n); break;
    case Algorithm::Greedy2: res = greedy2(f, cfg.lambda, cfg.n); break;
    case Algorithm::Opt: res = opt_exhaustive(f, cfg.lambda, cfg.n); break;
    default: throw ConfigError("run_baseline_experiment: not a baseline algorithm");
  }
  std::filesystem::create_directories(cfg.out_dir);
  std::ostringstream os;
  CsvWriter w(os, "baseline/1", {"algorithm", "configuration", "cost", "evaluations"});
  w.row()
      .col(to_string(cfg.algorithm))
      .col(res.configuration.to_string())
      .col(res.cost)
      .col(static_cast<std::uint64_t>(res.evaluations));
  std::filesystem::path p = std::filesystem::path(cfg.out_dir) / "result.csv";
  detail::write_text(p, os.str());

  RunResult out;
  out.files.push_back(p);
  SummaryRow s;
  s.replication = 0;
  s.time_avg_mse = res.cost;
  s.time_avg_weight = res.configuration.weight();
  out.summaries.push_back(s);
  return out;
}

struct SweepRow {
  double beta;
  bool exact_available;
  double exact_cost;       // E_{pi_beta} of the objective
  double chain_cost;       // finite-run chain average
  double opt_cost;
  double greedy1_cost;     // Lagrangian sweep only
  double greedy2_cost;
};

// For each beta: exact steady-state expected cost, a finite-run chain
// estimate averaged over replications, and the baselines.
inline std::vector<SweepRow> sweep_beta(const ExperimentConfig& cfg, const Instance& inst) {
  MseFn f = inst.mse();
  const int n = cfg.n;
  const bool exact_ok = n <= 20;
  std::vector<SweepRow> rows;

  for (double beta : cfg.betas) {
    SweepRow row{};
    row.beta = beta;
    row.exact_available = exact_ok;

    if (cfg.sweep_shell) {
      const int nbar = static_cast<int>(cfg.nbar);
      auto base = mse_energy(f, 0.0, n);
      ShellEnergy shell(base, nbar);
      if (exact_ok) {
        ExactDistribution pi = exact_gibbs_distribution(shell, beta, n);
        row.exact_cost = expectation(pi, [&](const Config& b) { return f(b); });
        row.opt_cost = opt_shell(f, nbar, n).cost;
      } else {
        row.exact_cost = std::nan("");
        row.opt_cost = std::nan("");
      }
      row.greedy1_cost = std::nan("");
      row.greedy2_cost = greedy2_cardinality(f, nbar, n).cost;

      // finite-run swap chain: post-burn-in time average over replications
      double acc = 0.0;
      std::uint64_t kept = 0;
      for (int r = 0; r < cfg.replications; ++r) {
        Rng rng = make_replication_rng(cfg.seed, static_cast<std::uint64_t>(r));
        Config start(n, nbar == 0 ? 0 : ((1ULL << nbar) - 1));
        GibbsChainState st{start, beta, 0};
        for (std::uint64_t t = 1; t <= cfg.horizon; ++t) {
          st = swap_step_hard(st, shell, nbar, rng);
          if (t > cfg.effective_burn_in()) {
            acc += f(st.current);
            ++kept;
          }
        }
      }
      row.chain_cost = acc / static_cast<double>(kept);
    } else {
      auto energy = mse_energy(f, cfg.lambda, n);
      if (exact_ok) {
        ExactDistribution pi = exact_gibbs_distribution(energy, beta, n);
        row.exact_cost = expectation(pi, [&](const Config& b) { return energy.h(b); });
        row.opt_cost = opt_exhaustive(f, cfg.lambda, n).cost;
      } else {
        row.exact_cost = std::nan("");
        row.opt_cost = std::nan("");
      }
      row.greedy1_cost = greedy1(f, cfg.lambda, n).cost;
      row.greedy2_cost = greedy2(f, cfg.lambda, n).cost;

      // finite-run BG from a random start: post-burn-in time average over
      // replications
      double acc = 0.0;
      std::uint64_t kept = 0;
      for (int r = 0; r < cfg.replications; ++r) {
        Rng rng = make_replication_rng(cfg.seed, static_cast<std::uint64_t>(r));
        std::uniform_int_distribution<std::uint64_t> pick(0, config_count(n) - 1);
        GibbsChainState st{Config(n, pick(rng)), beta, 0};
        for (std::uint64_t t = 1; t <= cfg.horizon; ++t) {
          st = bg_step(st, energy, rng);
          if (t > cfg.effective_burn_in()) {
            acc += energy.h(st.current);
            ++kept;
          }
        }
      }
      row.chain_cost = acc / static_cast<double>(kept);
    }
    rows.push_back(row);
  }
  return rows;
}

inline RunResult run_sweep_experiment(const ExperimentConfig& cfg, const Instance& inst) {
  std::vector<SweepRow> rows = sweep_beta(cfg, inst);
  std::filesystem::create_directories(cfg.out_dir);
  std::ostringstream os;
  const char* schema = cfg.sweep_shell ? "sweep-shell/1" : "sweep/1";
  CsvWriter w(os, schema,
              {"beta", "exact_available", "exact_cost", "chain_cost", "opt_cost", "greedy1_cost",
               "greedy2_cost"});
  for (const SweepRow& r : rows) {
    w.row()
        .col(r.beta)
        .col(r.exact_available ? 1 : 0)
        .col(r.exact_cost)
        .col(r.chain_cost)
        .col(r.opt_cost)
        .col(r.greedy1_cost)
        .col(r.greedy2_cost);
  }
  std::filesystem::path p = std::filesystem::path(cfg.out_dir) / "sweep.csv";
  detail::write_text(p, os.str());
  RunResult out;
  out.files.push_back(p);
  return out;
}

// Deterministic given (seed, cfg): writes the run's CSV files under cfg.out_dir
// and returns the per-replication summaries.
inline RunResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  Instance inst = build_instance(cfg);
  switch (cfg.algorithm) {
    case Algorithm::Greedy1:
    case Algorithm::Greedy2:
    case Algorithm::Opt:
      return run_baseline_experiment(cfg, inst);
    case Algorithm::SweepBeta:
      return run_sweep_experiment(cfg, inst);
    default:
      return run_slot_experiment(cfg, inst);
  }
}

inline LambdaStar oracle_lambda_star(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.n > 20) throw TooLarge("oracle lambda-star: n <= 20 required");
  Instance inst = build_instance(cfg);
  MseFn f = inst.mse();
  double nbar = cfg.nbar;
  if (cfg.nbar_from_lambda >= 0.0)
    nbar = gibbs_mean_weight(f, cfg.beta, cfg.nbar_from_lambda, cfg.n);
  return solve_lambda_star(f, cfg.beta, nbar, cfg.n);
}

}  // namespace senselect

#endif  // SENSELECT_RUNNER_HPP
