#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cgd/code.hpp"
#include "cgd/metrics.hpp"
#include "cgd/operator.hpp"

namespace cgd {

enum class StepMode { kFixed, kAdaptive };
enum class InitMode { kZero, kAdjoint };
enum class StopReason { kThreshold, kMaxIters };

std::string_view to_string(StepMode m) noexcept;
std::string_view to_string(InitMode m) noexcept;
std::string_view to_string(StopReason r) noexcept;
StepMode parse_step_mode(std::string_view s);
InitMode parse_init_mode(std::string_view s);
StopReason parse_stop_reason(std::string_view s);

struct CgdConfig {
  StepMode step_mode = StepMode::kFixed;
  /// Fixed step, or the first Nelder-Mead start in adaptive mode. Defaults to op.default_step().
  std::optional<double> eta;
  int k1_max = 50;
  int k2_max = 25;
  double eps_t = 1e-3;
  InitMode x0_mode = InitMode::kZero;
  /// Explicit starting point; overrides x0_mode.
  std::optional<Vector> x0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// One row per iterate x^k. Row 0 describes x^0 and has no eta / change.
struct IterationRecord {
  int iter = 0;
  double eta = std::numeric_limits<double>::quiet_NaN();
  double residual = 0.0;                 ///< ||y - A x^k||
  std::optional<double> norm_change;     ///< (1/sqrt n) ||x^k - x^{k-1}||
  std::optional<double> ref_err_tilde;   ///< (1/sqrt n) ||x^k - project(x)||
  std::optional<double> ref_err_x;       ///< (1/sqrt n) ||x^k - x||
  /// Adaptive mode: l(eta_init) for the search that chose eta. Not exported to CSV.
  std::optional<double> loss_init;
};

struct SolverTrace {
  std::vector<IterationRecord> records;
  StopReason stop_reason = StopReason::kMaxIters;

  static constexpr std::string_view kCsvHeader = "iter,eta,residual,norm_change,ref_err_tilde,ref_err_x";

  [[nodiscard]] std::string to_csv() const;
  /// Parses to_csv output. The stop reason is re-derived from the rows and `eps_t`.
  static SolverTrace from_csv(std::string_view csv, double eps_t);
};

struct CgdResult {
  Vector x_hat;
  SolverTrace trace;
  std::optional<QualityReport> quality;
  int iterations = 0;
};

/// project(x_k + eta A^T (y - A x_k)).
Vector cgd_step(const Eigen::Ref<const Vector>& x_k, const Eigen::Ref<const Vector>& y, const LinearOperator& op,
                double eta, const CompressionCode& code);

struct AdaptiveStep {
  double eta = 0.0;
  double loss = 0.0;       ///< l(eta)
  double loss_init = 0.0;  ///< l(eta_init)
  Vector x_next;           ///< project(x_k + eta g)
  int evaluations = 0;
};

/// Nelder-Mead on l(eta) = ||y - A project(x_k + eta A^T (y - A x_k))|| from
/// the simplex {eta_init, 2 eta_init}, at most k2_max iterations. Returns the
/// best probe, so l(eta) <= l(eta_init).
AdaptiveStep adaptive_step(const Eigen::Ref<const Vector>& x_k, const Eigen::Ref<const Vector>& y,
                           const LinearOperator& op, const CompressionCode& code, double eta_init, int k2_max = 25);

/// C-GD. When `ground_truth` is given the trace carries reference errors and
/// the result a QualityReport (its snr_db is `snr_db`).
CgdResult cgd_run(const Eigen::Ref<const Vector>& y, const LinearOperator& op, const CompressionCode& code,
                  const CgdConfig& config, const std::optional<Vector>& ground_truth = std::nullopt,
                  double snr_db = std::numeric_limits<double>::infinity());

struct CspResult {
  Vector x_hat;
  double residual = 0.0;
  double residual_sq = 0.0;
  std::size_t index = 0;  ///< position of x_hat in the codebook
};

/// argmin over the codebook of ||y - A u||^2, first minimizer on ties.
CspResult csp_exhaustive(const Eigen::Ref<const Vector>& y, const LinearOperator& op,
                         const std::vector<Vector>& codebook, std::size_t guard = std::size_t{1} << 20);

}  // namespace cgd
