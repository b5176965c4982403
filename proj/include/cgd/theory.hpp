#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "cgd/operator.hpp"

namespace cgd {

/// mu(u, v, eta) = <u, v> - eta <A u, A v> for unit-norm u, v.
double mu_coefficient(const Eigen::Ref<const Vector>& u, const Eigen::Ref<const Vector>& v, double eta,
                      const LinearOperator& op);

/// 0.9 prev + 2 (2 + sqrt(n/m))^2 delta + (sigma_z/sigma_a) sqrt(8 (1+eps) r / m).
double theorem2_step_bound(double prev_err, double delta, double m, double n, double r, double eps, double sigma_z,
                           double sigma_a);

struct SubGaussianStepBound {
  double value = 0.0;
  /// m must exceed this: 16 K^4 (1+eps) r / (mu0^2 sigma_a^4 log2 e).
  double required_m = 0.0;
  double distortion_coefficient = 0.0;  ///< 8 (1 + 3 K n / (sigma_a^2 m))
  double noise_coefficient = 0.0;       ///< (9 K sigma_z / sigma_a^2) sqrt(r (1+eps) / m)
};

/// mu0 prev + 8 (1 + 3 K n / (sigma_a^2 m)) delta + (9 K sigma_z / sigma_a^2) sqrt(r (1+eps) / m).
/// Requires 0 < mu0 < 1 and mu0 sigma_a^2 <= 2 K^2.
SubGaussianStepBound theorem4_step_bound(double prev_err, double mu0, double K, double delta, double m, double n,
                                         double r, double eps, double sigma_z, double sigma_a);

/// Inner objective s (t - u) + 0.5 ln((1 + s u)^2 - s^2).
double fstar_objective(double t, double u, double s);

/// min over u in [-1, 1] of max over s in (0, 1/(1-u)) of fstar_objective,
/// by grid search plus golden-section refinement on both axes.
double eval_fstar(double t);

/// Sub-Gaussian norm of a symmetric +-sigma_a variable: sigma_a / sqrt(ln 2).
double rademacher_psi2(double sigma_a);

struct BoundReport {
  std::string name;
  std::map<std::string, double> params;
  double theoretical_bound = 0.0;
  double empirical_value = 0.0;
  std::int64_t trials = 0;
  double slack = 0.0;
  bool pass = false;

  [[nodiscard]] std::string to_json() const;
};

/// 3 sqrt(p (1 - p) / trials) with p clamped to [0, 1].
double binomial_slack(double bound, std::int64_t trials);

/// Names accepted by tail_check.
const std::vector<std::string>& tail_check_names();

/// Monte-Carlo check of a concentration inequality.
///
///   lemma7_lower          m, tau: P(sum G_i^2 <= m (1 - tau)) <= exp(m/2 (tau + ln(1 - tau)))
///   lemma7_upper          m, tau: P(sum G_i^2 >= m (1 + tau)) <= exp(-m/2 (tau - ln(1 + tau)))
///   corollary2_sigma_max  m, n, t: P(sigma_max >= (1 + t) sqrt m + sqrt n) <= exp(-m t^2 / 2)
///   lemma10_subgauss      m, n, t, sigma_a: Rademacher A,
///                         P(mu >= t) <= exp(-(m t s^2 / 2K^2) min(1, t s^2 / 2K^2))
///   corollary6_gauss      m, n, sigma_a: Gaussian A, P(mu >= 0.45) <= 2^(-m/20)
///
/// mu = <u, v> - <A u, A v> / (m sigma_a^2) for fresh random unit u, v and A
/// in every trial. Throws ConfigError for unknown names or parameters.
BoundReport tail_check(std::string_view which, const std::map<std::string, double>& params, std::int64_t trials,
                       std::uint64_t seed, unsigned jobs = 1);

}  // namespace cgd
