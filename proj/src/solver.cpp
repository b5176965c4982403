#include "cgd/solver.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <utility>

#include "cgd/error.hpp"

namespace cgd {

std::string_view to_string(StepMode m) noexcept { return m == StepMode::kFixed ? "fixed" : "adaptive"; }
std::string_view to_string(InitMode m) noexcept { return m == InitMode::kZero ? "zero" : "adjoint"; }
std::string_view to_string(StopReason r) noexcept { return r == StopReason::kThreshold ? "threshold" : "max_iters"; }

StepMode parse_step_mode(std::string_view s) {
  if (s == "fixed") return StepMode::kFixed;
  if (s == "adaptive") return StepMode::kAdaptive;
  throw ConfigError("unknown step mode '" + std::string(s) + "'");
}

InitMode parse_init_mode(std::string_view s) {
  if (s == "zero") return InitMode::kZero;
  if (s == "adjoint") return InitMode::kAdjoint;
  throw ConfigError("unknown x0 mode '" + std::string(s) + "'");
}

StopReason parse_stop_reason(std::string_view s) {
  if (s == "threshold") return StopReason::kThreshold;
  if (s == "max_iters") return StopReason::kMaxIters;
  throw ConfigError("unknown stop reason '" + std::string(s) + "'");
}

void CgdConfig::validate() const {
  if (k1_max < 1) throw ConfigError("solver: k1_max must be >= 1");
  if (k2_max < 0) throw ConfigError("solver: k2_max must be >= 0");
  if (!(eps_t > 0.0)) throw ConfigError("solver: eps_t must be > 0");
  if (eta && !(*eta > 0.0 && std::isfinite(*eta))) throw ConfigError("solver: eta must be > 0");
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw ConfigError("trace csv: bad number '" + s + "'");
  return v;
}

std::optional<double> parse_optional(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_double(s);
}

}  // namespace

std::string SolverTrace::to_csv() const {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : records) {
    out += std::to_string(r.iter);
    out += ',';
    if (!std::isnan(r.eta)) out += fmt(r.eta);
    out += ',' + fmt(r.residual) + ',' + fmt(r.norm_change) + ',' + fmt(r.ref_err_tilde) + ',' + fmt(r.ref_err_x);
    out += '\n';
  }
  return out;
}

SolverTrace SolverTrace::from_csv(std::string_view csv, double eps_t) {
  std::istringstream in{std::string(csv)};
  std::string line;
  if (!std::getline(in, line) || split_fields(line) != split_fields(std::string(kCsvHeader))) {
    throw ConfigError("trace csv: missing or wrong header");
  }
  SolverTrace t;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 6) throw ConfigError("trace csv: expected 6 fields in '" + line + "'");
    IterationRecord r;
    r.iter = static_cast<int>(parse_double(f[0]));
    if (!f[1].empty()) r.eta = parse_double(f[1]);
    r.residual = parse_double(f[2]);
    r.norm_change = parse_optional(f[3]);
    r.ref_err_tilde = parse_optional(f[4]);
    r.ref_err_x = parse_optional(f[5]);
    t.records.push_back(r);
  }
  if (t.records.empty()) throw ConfigError("trace csv: no rows");
  const auto& last = t.records.back().norm_change;
  t.stop_reason = last && *last < eps_t ? StopReason::kThreshold : StopReason::kMaxIters;
  return t;
}

Vector cgd_step(const Eigen::Ref<const Vector>& x_k, const Eigen::Ref<const Vector>& y, const LinearOperator& op,
                double eta, const CompressionCode& code) {
  if (x_k.size() != op.cols() || y.size() != op.rows() || code.length() != op.cols()) {
    throw DimensionError("cgd_step: inconsistent dimensions");
  }
  if (!(eta > 0.0)) throw DomainError("cgd_step: eta must be > 0");
  const Vector g = op.adjoint(y - op.apply(x_k));
  return code.project(x_k + eta * g);
}

AdaptiveStep adaptive_step(const Eigen::Ref<const Vector>& x_k, const Eigen::Ref<const Vector>& y,
                           const LinearOperator& op, const CompressionCode& code, double eta_init, int k2_max) {
  if (!(eta_init > 0.0)) throw DomainError("adaptive_step: eta_init must be > 0");
  if (x_k.size() != op.cols() || y.size() != op.rows() || code.length() != op.cols()) {
    throw DimensionError("adaptive_step: inconsistent dimensions");
  }
  const Vector g = op.adjoint(y - op.apply(x_k));

  AdaptiveStep best;
  auto loss = [&](double eta) {
    Vector candidate = code.project(x_k + eta * g);
    double l = (y - op.apply(candidate)).norm();
    if (!std::isfinite(l)) l = std::numeric_limits<double>::infinity();
    ++best.evaluations;
    if (best.evaluations == 1 || l < best.loss) {
      best.eta = eta;
      best.loss = l;
      best.x_next = std::move(candidate);
    }
    return l;
  };

  best.loss_init = loss(eta_init);
  if (k2_max == 0 || g.squaredNorm() == 0.0) return best;

  // Two-point simplex: p[0] best, p[1] worst.
  double p[2] = {eta_init, 2.0 * eta_init};
  double f[2] = {best.loss_init, loss(p[1])};
  auto guard = [&](double eta) { return eta > 0.0 ? eta : p[0] / 2.0; };

  for (int it = 0; it < k2_max; ++it) {
    if (f[1] < f[0]) {
      std::swap(p[0], p[1]);
      std::swap(f[0], f[1]);
    }
    if (std::abs(p[1] - p[0]) <= 1e-12 * p[0]) break;
    const double r = guard(p[0] + (p[0] - p[1]));
    const double fr = loss(r);
    if (fr < f[0]) {
      const double e = guard(p[0] + 2.0 * (p[0] - p[1]));
      const double fe = loss(e);
      if (fe < fr) {
        p[1] = e;
        f[1] = fe;
      } else {
        p[1] = r;
        f[1] = fr;
      }
      continue;
    }
    if (fr < f[1]) {
      const double c = p[0] + 0.5 * (r - p[0]);
      const double fc = loss(c);
      if (fc <= fr) {
        p[1] = c;
        f[1] = fc;
        continue;
      }
    } else {
      const double c = p[0] + 0.5 * (p[1] - p[0]);
      const double fc = loss(c);
      if (fc < f[1]) {
        p[1] = c;
        f[1] = fc;
        continue;
      }
    }
    // Shrink towards the best vertex.
    p[1] = p[0] + 0.5 * (p[1] - p[0]);
    f[1] = loss(p[1]);
  }
  return best;
}

CgdResult cgd_run(const Eigen::Ref<const Vector>& y, const LinearOperator& op, const CompressionCode& code,
                  const CgdConfig& config, const std::optional<Vector>& ground_truth, double snr_db) {
  config.validate();
  const Eigen::Index m = op.rows();
  const Eigen::Index n = op.cols();
  if (m == 0 || n == 0) throw DimensionError("cgd_run: empty operator");
  if (y.size() != m) throw DimensionError("cgd_run: y has length " + std::to_string(y.size()) + ", expected " +
                                          std::to_string(m));
  if (code.length() != n) throw DimensionError("cgd_run: code length does not match operator");
  if (ground_truth && ground_truth->size() != n) throw DimensionError("cgd_run: ground truth length mismatch");
  if (config.x0 && config.x0->size() != n) throw DimensionError("cgd_run: x0 length mismatch");

  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  std::optional<Vector> x_tilde;
  if (ground_truth) x_tilde = code.project(*ground_truth);

  Vector x;
  if (config.x0) {
    x = *config.x0;
  } else if (config.x0_mode == InitMode::kAdjoint) {
    x = op.default_step() * op.adjoint(y);
  } else {
    x = Vector::Zero(n);
  }

  auto record = [&](int iter, const Vector& xk) {
    IterationRecord r;
    r.iter = iter;
    r.residual = (y - op.apply(xk)).norm();
    if (ground_truth) {
      r.ref_err_tilde = (xk - *x_tilde).norm() * inv_sqrt_n;
      r.ref_err_x = (xk - *ground_truth).norm() * inv_sqrt_n;
    }
    return r;
  };

  CgdResult result;
  result.trace.records.push_back(record(0, x));
  double eta = config.eta.value_or(op.default_step());

  for (int k = 1; k <= config.k1_max; ++k) {
    Vector next;
    std::optional<double> loss_init;
    if (config.step_mode == StepMode::kAdaptive) {
      AdaptiveStep s = adaptive_step(x, y, op, code, eta, config.k2_max);
      eta = s.eta;
      loss_init = s.loss_init;
      next = std::move(s.x_next);
    } else {
      next = cgd_step(x, y, op, eta, code);
    }
    IterationRecord r = record(k, next);
    r.eta = eta;
    r.loss_init = loss_init;
    r.norm_change = (next - x).norm() * inv_sqrt_n;
    result.trace.records.push_back(r);
    x = std::move(next);
    result.iterations = k;
    if (*r.norm_change < config.eps_t) {
      result.trace.stop_reason = StopReason::kThreshold;
      break;
    }
  }
  result.x_hat = std::move(x);
  if (ground_truth) result.quality = quality_report(*ground_truth, result.x_hat, snr_db);
  return result;
}

CspResult csp_exhaustive(const Eigen::Ref<const Vector>& y, const LinearOperator& op,
                         const std::vector<Vector>& codebook, std::size_t guard) {
  if (codebook.size() > guard) {
    throw SizeError("csp_exhaustive: codebook has " + std::to_string(codebook.size()) + " words, guard is " +
                    std::to_string(guard));
  }
  if (codebook.empty()) throw SizeError("csp_exhaustive: empty codebook");
  if (y.size() != op.rows()) throw DimensionError("csp_exhaustive: y length mismatch");
  CspResult best;
  for (std::size_t i = 0; i < codebook.size(); ++i) {
    if (codebook[i].size() != op.cols()) throw DimensionError("csp_exhaustive: codeword length mismatch");
    const double r2 = (y - op.apply(codebook[i])).squaredNorm();
    if (i == 0 || r2 < best.residual_sq) {
      best.residual_sq = r2;
      best.index = i;
    }
  }
  best.x_hat = codebook[best.index];
  best.residual = std::sqrt(best.residual_sq);
  return best;
}

}  // namespace cgd
