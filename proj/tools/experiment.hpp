#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cgd/external_codec.hpp"
#include "cgd/operator.hpp"
#include "cgd/poly_code.hpp"
#include "cgd/solver.hpp"
#include "cgd/sparse_code.hpp"

namespace cgd::cli {

struct SparseSignalSpec {
  Eigen::Index n = 0;
  Eigen::Index k = 0;
};
struct PolySignalSpec {
  Eigen::Index n = 0;
  int max_degree = 0;
  int max_singularities = 0;
};
struct FileSignalSpec {
  std::filesystem::path path;  ///< .f64v, or .pgm read as pixel / 255
};

struct SignalSpec {
  std::variant<SparseSignalSpec, PolySignalSpec, FileSignalSpec> source;
  bool codeword = false;  ///< replace the generated signal by its projection onto the code
};

struct OperatorSpec {
  OperatorKind kind = OperatorKind::kGaussianUnit;
  std::optional<Eigen::Index> m;
  std::optional<double> ratio;  ///< m = ceil(ratio n)
  double sigma_a = 1.0;
  std::optional<std::uint64_t> seed;  ///< fixed operator for every trial; default derives from the master seed
};

struct SparseCodeSpec {
  Eigen::Index k = 1;
  std::optional<int> b;
  std::optional<double> gamma;
};
struct PolyCodeSpec {
  int max_degree = 0;
  int max_singularities = 0;
  std::optional<int> b;
  std::optional<double> gamma;
};
using CodeSpec = std::variant<SparseCodeSpec, PolyCodeSpec, ExternalCodecSpec>;

struct SweepSpec {
  std::vector<double> ratios;
  std::vector<double> snr_db;
};

struct ExperimentConfig {
  std::optional<SignalSpec> signal;
  std::optional<OperatorSpec> op;
  std::optional<CodeSpec> code;
  double snr_db = std::numeric_limits<double>::infinity();
  CgdConfig solver;
  int trials = 1;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> output;
  std::optional<SweepSpec> sweep;
};

/// Parses the JSON config. Unknown keys, wrong types and bad values throw ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Normalized JSON echo of a config (every field explicit).
std::string config_to_json(const ExperimentConfig& config);

Eigen::Index resolve_m(const OperatorSpec& op, Eigen::Index n);
std::unique_ptr<CompressionCode> make_code(const CodeSpec& spec, Eigen::Index n);
/// Description of the synthetic signal law, recorded in every summary.
std::string signal_law(const SignalSpec& spec);

struct TrialResult {
  int trial = 0;
  Eigen::Index m = 0;
  Eigen::Index n = 0;
  double psnr_db = 0.0;
  double mse = 0.0;
  double normalized_error = 0.0;
  double ref_err_tilde = 0.0;
  double realized_snr_db = 0.0;
  double final_residual = 0.0;
  int iterations = 0;
  StopReason stop_reason = StopReason::kMaxIters;
  std::uint64_t signal_seed = 0;
  std::uint64_t operator_seed = 0;
  std::uint64_t noise_seed = 0;
  std::string trace_csv;
};

struct Instance {
  Vector x;
  LinearOperator op;
  NoisyMeasurement measurement;
  std::uint64_t signal_seed = 0;
  std::uint64_t noise_seed = 0;
};

/// Signal, operator and measurements for one trial.
Instance make_instance(const ExperimentConfig& config, const CompressionCode* code, int trial);
TrialResult run_trial(const ExperimentConfig& config, const CompressionCode& code, int trial);

struct RunOptions {
  std::filesystem::path out_dir;
  unsigned jobs = 1;
  bool quiet = false;
};

/// Runs every trial, writes trial_NNN.csv and summary.json into out_dir.
std::vector<TrialResult> cmd_run(const ExperimentConfig& config, const RunOptions& options);

/// Runs cmd_run per (ratio, snr) cell and writes sweep.csv.
void cmd_sweep(const ExperimentConfig& config, const RunOptions& options);
inline constexpr std::string_view kSweepHeader = "ratio,snr_db,trial,psnr,iters,stop_reason";

struct SweepRow {
  double ratio = 0.0;
  double snr_db = 0.0;
  int trial = 0;
  double psnr = 0.0;
  int iters = 0;
  StopReason stop_reason = StopReason::kMaxIters;
};
std::vector<SweepRow> parse_sweep_csv(const std::string& csv);

struct ProjectReport {
  std::size_t bits = 0;
  double distortion = 0.0;
  std::optional<double> bound;
  bool idempotent = false;
};

/// project(x) for the config's code; writes projected.f64v and project.json.
ProjectReport cmd_project(const ExperimentConfig& config, const std::filesystem::path& input,
                          const RunOptions& options);

struct CspRow {
  int trial = 0;
  double csp_residual = 0.0;
  double cgd_residual = 0.0;
};

/// CSP against C-GD on each trial; writes csp.csv and summary.json.
std::vector<CspRow> cmd_csp(const ExperimentConfig& config, const RunOptions& options);

/// Formats a double so that it parses back to the same value ("inf" / "-inf" / "nan" for non-finite).
std::string format_double(double v);
double parse_double_field(const std::string& s);

}  // namespace cgd::cli
