#ifndef SENSELECT_MODEL_HPP
#define SENSELECT_MODEL_HPP

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <span>
#include <vector>

#include "senselect/configuration.hpp"
#include "senselect/errors.hpp"
#include "senselect/numeric.hpp"
#include "senselect/rng.hpp"

namespace senselect {

constexpr double kSymmetryTol = 1e-10;
constexpr double kPsdTol = -1e-10;
constexpr double kConditionGuard = 1e12;

// Jointly Gaussian process X in R^q with one coordinate per sensor and
// perfect per-coordinate sensing.
struct VectorGaussianPrior {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;

  int dim() const { return static_cast<int>(covariance.rows()); }

  void validate() const {
    const auto& M = covariance;
    if (M.rows() != M.cols() || mean.size() != M.rows())
      throw DimensionMismatch("VectorGaussianPrior: shape mismatch");
    if ((M - M.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol)
      throw ConfigError("VectorGaussianPrior: covariance not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < kPsdTol)
      throw ConfigError("VectorGaussianPrior: covariance not PSD");
  }
};

// Scalar process X ~ N(theta, (1-theta)^2) with theta confined to
// [theta_lo, theta_hi], theta_hi < 1.
struct ScalarParametricPrior {
  double theta;
  double theta_lo = 0.0;
  double theta_hi = 0.8;

  double prior_mean() const { return theta; }
  double prior_variance() const { return square(1.0 - theta); }

  void validate() const {
    if (!(theta_lo <= theta_hi) || !(theta_hi < 1.0))
      throw ConfigError("ScalarParametricPrior: need theta_lo <= theta_hi < 1");
    if (theta < theta_lo || theta > theta_hi)
      throw ConfigError("ScalarParametricPrior: theta outside [theta_lo, theta_hi]");
  }
};

// Per-sensor observation noise standard deviations; zero means perfect sensing.
struct SensorNoise {
  std::vector<double> sigmas;

  int size() const { return static_cast<int>(sigmas.size()); }

  void validate(int n) const {
    if (size() != n) throw DimensionMismatch("SensorNoise: length != N");
    for (double s : sigmas)
      if (!(s >= 0.0)) throw ConfigError("SensorNoise: negative sigma");
  }
};

inline Eigen::MatrixXd covariance_from_factor(const Eigen::MatrixXd& a) {
  return a.transpose() * a;
}

// M = A^T A with A_ij i.i.d. uniform on [-1,1]; symmetric PSD by construction.
inline Eigen::MatrixXd generate_covariance(int n, Rng& rng) {
  if (n < 1) throw ConfigError("generate_covariance: n must be >= 1");
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = unif(rng);
  return covariance_from_factor(a);
}

namespace detail {

inline std::vector<int> active_indices(const Config& s) {
  std::vector<int> idx;
  idx.reserve(static_cast<std::size_t>(s.weight()));
  for (int k = 0; k < s.size(); ++k)
    if (s.test(k)) idx.push_back(k);
  return idx;
}

}  // namespace detail

// Exact MMSE when the coordinates in S are observed perfectly:
// trace of M(S^c,S^c) - M(S^c,S) M(S,S)^{-1} M(S,S^c).
inline double mse_subset_vector(const VectorGaussianPrior& prior, const Config& s) {
  const Eigen::MatrixXd& M = prior.covariance;
  const int n = prior.dim();
  if (s.size() != n) throw DimensionMismatch("mse_subset_vector: config size != dim");
  std::vector<int> obs = detail::active_indices(s);
  std::vector<int> hid;
  for (int k = 0; k < n; ++k)
    if (!s.test(k)) hid.push_back(k);
  if (obs.empty()) return M.trace();
  if (hid.empty()) return 0.0;

  const int p = static_cast<int>(obs.size());
  const int q = static_cast<int>(hid.size());
  Eigen::MatrixXd Mss(p, p), Msh(p, q);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) Mss(i, j) = M(obs[i], obs[j]);
    for (int j = 0; j < q; ++j) Msh(i, j) = M(obs[i], hid[j]);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Mss);
  const auto& ev = es.eigenvalues();
  double lo = ev.minCoeff(), hi = ev.maxCoeff();
  if (!(lo > 0.0) || hi / lo > kConditionGuard)
    throw SingularSubmatrix("mse_subset_vector: M(S,S) numerically singular");
  Eigen::MatrixXd MssInvMsh =
      es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose() * Msh;

  double tr = 0.0;
  for (int j = 0; j < q; ++j) {
    tr += M(hid[j], hid[j]);
    for (int i = 0; i < p; ++i) tr -= Msh(i, j) * MssInvMsh(i, j);
  }
  return std::max(tr, 0.0);
}

struct Posterior {
  double mean;
  double variance;
};

// Conjugate Gaussian update in precision form. A selected sensor with
// sigma = 0 is an exact read: allowed only as a singleton.
inline Posterior posterior_scalar(double theta, const SensorNoise& noise, const Config& s,
                                  std::span<const double> z_s) {
  if (static_cast<std::size_t>(s.weight()) != z_s.size())
    throw DimensionMismatch("posterior_scalar: |z_S| != |S|");
  const double prior_var = square(1.0 - theta);
  double precision = 1.0 / prior_var;
  double weighted = theta / prior_var;
  std::size_t i = 0;
  for (int k = 0; k < s.size(); ++k) {
    if (!s.test(k)) continue;
    double sigma = noise.sigmas[static_cast<std::size_t>(k)];
    if (sigma == 0.0) {
      if (s.weight() > 1)
        throw DegenerateNoise("posterior_scalar: sigma = 0 with |S| > 1");
      return Posterior{z_s[i], 0.0};
    }
    double iv = 1.0 / square(sigma);
    precision += iv;
    weighted += z_s[i] * iv;
    ++i;
  }
  double variance = 1.0 / precision;
  return Posterior{weighted * variance, variance};
}

// Posterior variance given (theta, S); deterministic for the scalar model.
inline double y_b_scalar(double theta, const SensorNoise& noise, const Config& s) {
  double precision = 1.0 / square(1.0 - theta);
  for (int k = 0; k < s.size(); ++k) {
    if (!s.test(k)) continue;
    double sigma = noise.sigmas[static_cast<std::size_t>(k)];
    if (sigma == 0.0) {
      if (s.weight() > 1) throw DegenerateNoise("y_b_scalar: sigma = 0 with |S| > 1");
      return 0.0;
    }
    precision += 1.0 / square(sigma);
  }
  return 1.0 / precision;
}

// One slot of the scalar model: X ~ N(theta, (1-theta)^2), z_k = X + w_k for
// active k. Inactive entries are NaN.
struct ScalarDraw {
  double x;
  std::vector<double> z;
};

inline ScalarDraw sample_slot(const ScalarParametricPrior& prior, const SensorNoise& noise,
                              const Config& s, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  ScalarDraw out;
  out.x = prior.prior_mean() + std::sqrt(prior.prior_variance()) * gauss(rng);
  out.z.assign(noise.sigmas.size(), std::numeric_limits<double>::quiet_NaN());
  for (int k = 0; k < s.size(); ++k)
    if (s.test(k))
      out.z[static_cast<std::size_t>(k)] =
          out.x + noise.sigmas[static_cast<std::size_t>(k)] * gauss(rng);
  return out;
}

// One slot of the vector model with perfect sensing: z_k = X_k for active k.
struct VectorDraw {
  Eigen::VectorXd x;
  Eigen::VectorXd z;  // NaN where inactive
};

inline VectorDraw sample_slot(const VectorGaussianPrior& prior, const Config& s, Rng& rng) {
  const int n = prior.dim();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(prior.covariance);
  Eigen::VectorXd scale = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd u(n);
  for (int i = 0; i < n; ++i) u(i) = gauss(rng);
  VectorDraw out;
  out.x = prior.mean + es.eigenvectors() * scale.asDiagonal() * u;
  out.z = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::quiet_NaN());
  for (int k = 0; k < n; ++k)
    if (s.test(k)) out.z(k) = out.x(k);
  return out;
}

// log density of the observations {z_k : k in S} under
// Z_S ~ N(theta 1, (1-theta)^2 11^T + diag(sigma_S^2)), evaluated with the
// rank-one-plus-diagonal decomposition (Sherman-Morrison and the matrix
// determinant lemma). Empty S gives 0.
inline double loglik_subset(std::span<const double> z, const Config& s, double theta,
                            const SensorNoise& noise) {
  if (z.size() != static_cast<std::size_t>(s.size()))
    throw DimensionMismatch("loglik_subset: z length != N");
  const double tau2 = square(1.0 - theta);
  double sum_iv = 0.0, quad_diag = 0.0, cross = 0.0, logdet_diag = 0.0;
  int m = 0;
  for (int k = 0; k < s.size(); ++k) {
    if (!s.test(k)) continue;
    double sigma = noise.sigmas[static_cast<std::size_t>(k)];
    if (sigma == 0.0) throw DegenerateNoise("loglik_subset: sigma = 0 has no density");
    double iv = 1.0 / square(sigma);
    double u = z[static_cast<std::size_t>(k)] - theta;
    sum_iv += iv;
    quad_diag += u * u * iv;
    cross += u * iv;
    logdet_diag += std::log(square(sigma));
    ++m;
  }
  if (m == 0) return 0.0;
  double denom = 1.0 + tau2 * sum_iv;
  double quad = quad_diag - (tau2 / denom) * cross * cross;
  double logdet = logdet_diag + std::log(denom);
  return -0.5 * (m * std::log(2.0 * M_PI) + logdet + quad);
}

// Full-read log-likelihood log p(z | theta); requires all sigmas > 0.
inline double loglik_full(std::span<const double> z, double theta, const SensorNoise& noise) {
  return loglik_subset(z, Config::all_on(static_cast<int>(z.size())), theta, noise);
}

}  // namespace senselect

#endif  // SENSELECT_MODEL_HPP
