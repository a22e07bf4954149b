#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "senselect/analysis.hpp"
#include "senselect/constrained.hpp"
#include "senselect/energy.hpp"
#include "senselect/rng.hpp"

using namespace senselect;
using Catch::Approx;

namespace {

std::vector<double> random_energy_table(int n, std::uint64_t seed, double scale = 1.0) {
  Rng rng(seed);
  std::uniform_real_distribution<double> unif(0.0, scale);
  std::vector<double> f(1ULL << n);
  for (double& v : f) v = unif(rng);
  return f;
}

}  // namespace

TEST_CASE("exact_gibbs_distribution at infinite temperature is uniform") {
  DenseEnergy energy(4, random_energy_table(4, 1));
  ExactDistribution pi = exact_gibbs_distribution(energy, 0.0, 4);
  pi.validate();
  for (Eigen::Index i = 0; i < pi.probs.size(); ++i)
    REQUIRE(pi.probs(i) == Approx(1.0 / 16.0));
}

TEST_CASE("exact_gibbs_distribution factorizes for pure activation cost") {
  const int n = 5;
  const double beta = 1.3, lambda = 0.7;
  DenseEnergy energy(n, std::vector<double>(1ULL << n, 0.0), lambda);
  ExactDistribution pi = exact_gibbs_distribution(energy, beta, n);
  double p_on = std::exp(-beta * lambda) / (1.0 + std::exp(-beta * lambda));
  for (std::uint64_t m = 0; m < (1ULL << n); ++m) {
    int w = Config(n, m).weight();
    double expect = std::pow(p_on, w) * std::pow(1.0 - p_on, n - w);
    REQUIRE(pi.probs(static_cast<Eigen::Index>(m)) == Approx(expect).margin(1e-12));
  }
}

TEST_CASE("exact_gibbs_distribution 2-sensor hand computation") {
  DenseEnergy energy(2, {0.0, 1.0, 1.0, 2.0});
  ExactDistribution pi = exact_gibbs_distribution(energy, std::log(2.0), 2);
  REQUIRE(pi.probs(0) == Approx(4.0 / 9.0));
  REQUIRE(pi.probs(1) == Approx(2.0 / 9.0));
  REQUIRE(pi.probs(2) == Approx(2.0 / 9.0));
  REQUIRE(pi.probs(3) == Approx(1.0 / 9.0));
}

TEST_CASE("exact_gibbs_distribution survives beta = 1000") {
  DenseEnergy energy(4, random_energy_table(4, 9, 0.1));
  ExactDistribution pi = exact_gibbs_distribution(energy, 1000.0, 4);
  pi.validate();
}

TEST_CASE("exact enumeration guards size") {
  DenseEnergy energy(4, random_energy_table(4, 9));
  REQUIRE_THROWS_AS(exact_gibbs_distribution(energy, 1.0, 21), TooLarge);
  REQUIRE_THROWS_AS(bg_transition_matrix(energy, 1.0, 13), TooLarge);
}

TEST_CASE("bg_transition_matrix rows are stochastic and pi-stationary") {
  for (std::uint64_t seed : {11ULL, 12ULL, 13ULL}) {
    const int n = 6;
    const double beta = 2.2;
    DenseEnergy energy(n, random_energy_table(n, seed, 3.0));
    Eigen::MatrixXd P = bg_transition_matrix(energy, beta, n);
    for (Eigen::Index i = 0; i < P.rows(); ++i) REQUIRE(P.row(i).sum() == Approx(1.0).margin(1e-12));
    ExactDistribution pi = exact_gibbs_distribution(energy, beta, n);
    Eigen::RowVectorXd res = pi.probs.transpose() * P - pi.probs.transpose();
    REQUIRE(res.cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("bg_transition_matrix at beta zero is the fair-flip kernel") {
  const int n = 3;
  DenseEnergy energy(n, random_energy_table(n, 14));
  Eigen::MatrixXd P = bg_transition_matrix(energy, 0.0, n);
  for (std::uint64_t m = 0; m < (1ULL << n); ++m) {
    REQUIRE(P(m, m) == Approx(0.5));
    for (int j = 0; j < n; ++j)
      REQUIRE(P(m, m ^ (1ULL << j)) == Approx(1.0 / (2.0 * n)));
  }
}

TEST_CASE("dobrushin_coefficient closed forms") {
  REQUIRE(dobrushin_coefficient(Eigen::MatrixXd::Identity(4, 4)) == Approx(1.0));
  Eigen::MatrixXd same(3, 3);
  same << 0.2, 0.3, 0.5, 0.2, 0.3, 0.5, 0.2, 0.3, 0.5;
  REQUIRE(dobrushin_coefficient(same) == Approx(0.0).margin(1e-15));
  Eigen::MatrixXd two(2, 2);
  two << 0.9, 0.1, 0.2, 0.8;
  REQUIRE(dobrushin_coefficient(two) == Approx(0.7));
  Eigen::MatrixXd bad(2, 2);
  bad << 0.9, 0.3, 0.2, 0.8;
  REQUIRE_THROWS_AS(dobrushin_coefficient(bad), NotStochastic);
}

TEST_CASE("tv_distance closed forms") {
  Eigen::VectorXd p(2), q(2);
  p << 0.75, 0.25;
  q << 0.5, 0.5;
  REQUIRE(tv_distance(p, p) == 0.0);
  REQUIRE(tv_distance(p, q) == Approx(0.25));
  Eigen::VectorXd a(2), b(2);
  a << 1, 0;
  b << 0, 1;
  REQUIRE(tv_distance(a, b) == Approx(1.0));
  Eigen::VectorXd c(3);
  REQUIRE_THROWS_AS(tv_distance(p, c), DimensionMismatch);
}

TEST_CASE("mixing_bound closed forms") {
  REQUIRE(mixing_bound(2.0, 3, 1.5, 0) == 1.0);
  REQUIRE(mixing_bound(0.0, 1, 0.7, 5) == Approx(0.0));
  REQUIRE(mixing_bound(1.0, 2, 1.0, 3) ==
          Approx(std::pow(1.0 - std::exp(-2.0) / 4.0, 3.0)));
}

TEST_CASE("mode_mass_bound closed forms") {
  REQUIRE(mode_mass_bound(1e9, 4, 0.5) == Approx(1.0));
  REQUIRE(mode_mass_bound(0.0, 4, 0.5) == Approx(1.0 / 16.0));
  REQUIRE(mode_mass_bound(std::log(3.0), 2, 1.0) == Approx(0.5));
}

TEST_CASE("empirical_distribution basics") {
  std::vector<Config> traj(10, Config(3, 0b101));
  ExactDistribution emp = empirical_distribution(traj, 2);
  REQUIRE(emp.probs(0b101) == Approx(1.0));
  REQUIRE(emp.probs.sum() == Approx(1.0));
  REQUIRE_THROWS_AS(empirical_distribution(traj, 10), EmptyWindow);
}

TEST_CASE("subsampled BG chain contracts at least as fast as the bound") {
  // exact verification of the N-step total-variation bound
  Rng seeds(2025);
  for (int instance = 0; instance < 6; ++instance) {
    const int n = 3 + static_cast<int>(seeds() % 4);  // 3..6
    const double beta = 0.02 + 0.4 * (instance % 3);
    DenseEnergy energy(n, random_energy_table(n, seeds(), 2.0));
    double delta = energy_range(energy, n);
    ExactDistribution pi = exact_gibbs_distribution(energy, beta, n);
    Eigen::MatrixXd P = bg_transition_matrix(energy, beta, n);
    Eigen::MatrixXd Pn = P;
    for (int i = 1; i < n; ++i) Pn = Pn * P;  // N-step kernel

    Eigen::VectorXd start = Eigen::VectorXd::Zero(1 << n);
    start(0) = 1.0;
    double tv0 = tv_distance(start, pi.probs);
    Eigen::RowVectorXd v = start.transpose();
    for (long l = 1; l <= 50; ++l) {
      v = v * Pn;
      double tv = tv_distance(Eigen::VectorXd(v.transpose()), pi.probs);
      REQUIRE(tv <= tv0 * mixing_bound(beta, n, delta, l) + 1e-12);
    }
  }
}

TEST_CASE("unique minimizers hold at least the mode-mass bound") {
  Rng seeds(321);
  int checked = 0;
  while (checked < 20) {
    const int n = 3 + static_cast<int>(seeds() % 6);  // 3..8
    DenseEnergy energy(n, random_energy_table(n, seeds(), 3.0));
    double delta1 = minimizer_gap(energy, n);
    if (!(delta1 > 0.0)) continue;
    double beta = 0.5 + static_cast<double>(seeds() % 5);
    ExactDistribution pi = exact_gibbs_distribution(energy, beta, n);
    auto mins = exact_argmin(energy, n);
    REQUIRE(mins.size() == 1);
    REQUIRE(pi.prob(mins[0]) >= mode_mass_bound(beta, n, delta1) - 1e-12);
    ++checked;
  }
}

TEST_CASE("dobrushin coefficient of the N-step kernel obeys the bound") {
  Rng seeds(11);
  for (int instance = 0; instance < 5; ++instance) {
    const int n = 3 + static_cast<int>(seeds() % 3);  // 3..5
    const double beta = 0.1 + 0.2 * instance;
    DenseEnergy energy(n, random_energy_table(n, seeds(), 1.5));
    double delta = energy_range(energy, n);
    Eigen::MatrixXd P = bg_transition_matrix(energy, beta, n);
    Eigen::MatrixXd Pn = P;
    for (int i = 1; i < n; ++i) Pn = Pn * P;
    double bound = 1.0 - std::exp(-beta * n * delta - n * std::log(n));
    REQUIRE(dobrushin_coefficient(Pn) <= bound + 1e-12);
  }
}

TEST_CASE("optimal activation count decreases along a lambda grid") {
  // exhaustive-argmin route to the same monotonicity facts
  Rng seeds(500);
  for (int instance = 0; instance < 8; ++instance) {
    const int n = 4 + static_cast<int>(seeds() % 5);  // 4..8
    std::vector<double> f = random_energy_table(n, seeds(), 4.0);
    // make f monotone decreasing in the subset order, as an MSE is
    for (std::uint64_t m = 0; m < f.size(); ++m)
      for (int k = 0; k < n; ++k)
        if (m & (1ULL << k)) f[m] = std::min(f[m], f[m & ~(1ULL << k)]);
    MseFn mse = [&f](const Config& b) { return f[b.mask()]; };

    int prev_weight = n + 1;
    double prev_f = -1.0;
    for (int i = 0; i < 60; ++i) {
      double lambda = 0.05 * i;
      auto energy = mse_energy(mse, lambda, n);
      auto mins = exact_argmin(energy, n);
      int w = mins[0].weight();
      double fb = mse(mins[0]);
      REQUIRE(w <= prev_weight);
      REQUIRE(fb >= prev_f - 1e-9);
      prev_weight = w;
      prev_f = fb;
    }
  }
}

TEST_CASE("Gibbs mean activation is decreasing and Lipschitz in lambda") {
  Rng seeds(600);
  for (int instance = 0; instance < 6; ++instance) {
    const int n = 4 + static_cast<int>(seeds() % 5);  // 4..8
    const double beta = 0.5 + static_cast<double>(instance);
    std::vector<double> f = random_energy_table(n, seeds(), 3.0);
    MseFn mse = [&f](const Config& b) { return f[b.mask()]; };
    double lipschitz = (beta + 1.0) * n * n;
    double prev = gibbs_mean_weight(mse, beta, 0.0, n);
    for (int i = 1; i <= 40; ++i) {
      double lambda = 0.05 * i;
      double g = gibbs_mean_weight(mse, beta, lambda, n);
      REQUIRE(g <= prev + 1e-12);
      REQUIRE(std::abs(g - prev) <= lipschitz * 0.05 + 1e-12);
      prev = g;
    }
  }
}

TEST_CASE("long BG run lands within TV 0.01 of the stationary law") {
  const int n = 4;
  const double beta = 2.0;
  DenseEnergy energy(n, random_energy_table(n, 2718, 1.5));
  ExactDistribution pi = exact_gibbs_distribution(energy, beta, n);
  Rng rng(7);
  GibbsChainState st{Config(n), beta, 0};
  std::vector<Config> traj;
  const int steps = 1000000;
  traj.reserve(steps);
  for (int i = 0; i < steps; ++i) {
    st = bg_step(st, energy, rng);
    traj.push_back(st.current);
  }
  ExactDistribution emp = empirical_distribution(traj, steps / 10);
  REQUIRE(tv_distance(emp, pi) <= 0.01);
}
