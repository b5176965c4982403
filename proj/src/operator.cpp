#include "cgd/operator.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cgd/dct.hpp"
#include "cgd/error.hpp"
#include "cgd/rng.hpp"

namespace cgd {

std::string_view to_string(OperatorKind kind) noexcept {
  switch (kind) {
    case OperatorKind::kGaussianUnit: return "gaussian-unit";
    case OperatorKind::kGaussianOverN: return "gaussian-over-n";
    case OperatorKind::kRademacher: return "rademacher";
    case OperatorKind::kPartialDct: return "partial-dct";
  }
  return "unknown";
}

OperatorKind parse_operator_kind(std::string_view name) {
  for (auto k : {OperatorKind::kGaussianUnit, OperatorKind::kGaussianOverN, OperatorKind::kRademacher,
                 OperatorKind::kPartialDct}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown operator kind '" + std::string(name) + "'");
}

LinearOperator LinearOperator::sample(OperatorKind kind, Eigen::Index m, Eigen::Index n, double sigma_a,
                                      std::uint64_t seed) {
  if (m < 1 || n < 1) throw DimensionError("sample_operator: m and n must be >= 1");
  if (!(sigma_a > 0.0) || !std::isfinite(sigma_a)) throw DomainError("sample_operator: sigma_a must be > 0");
  if (kind == OperatorKind::kPartialDct && m > n) {
    throw DimensionError("sample_operator: partial-dct cannot select " + std::to_string(m) + " distinct rows out of " +
                         std::to_string(n));
  }

  LinearOperator op;
  op.kind_ = kind;
  op.m_ = m;
  op.n_ = n;
  op.sigma_a_ = kind == OperatorKind::kPartialDct ? 1.0 : sigma_a;
  op.seed_ = seed;

  SeededRng rng(derive_seed(seed, to_string(kind)));
  switch (kind) {
    case OperatorKind::kGaussianUnit:
    case OperatorKind::kGaussianOverN: {
      const double scale = kind == OperatorKind::kGaussianUnit ? sigma_a : sigma_a / std::sqrt(static_cast<double>(n));
      op.matrix_.resize(m, n);
      for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < n; ++j) op.matrix_(i, j) = scale * rng.normal();
      break;
    }
    case OperatorKind::kRademacher:
      op.matrix_.resize(m, n);
      for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < n; ++j) op.matrix_(i, j) = sigma_a * rng.sign();
      break;
    case OperatorKind::kPartialDct: {
      std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
      std::iota(perm.begin(), perm.end(), Eigen::Index{0});
      for (Eigen::Index i = 0; i < m; ++i) {
        const auto j = i + static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::uint64_t>(n - i)));
        std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
      }
      op.rows_.assign(perm.begin(), perm.begin() + m);
      std::sort(op.rows_.begin(), op.rows_.end());
      break;
    }
  }
  return op;
}

LinearOperator LinearOperator::from_dense(Matrix a) {
  if (a.rows() < 1 || a.cols() < 1) throw DimensionError("from_dense: empty matrix");
  LinearOperator op;
  op.kind_ = OperatorKind::kGaussianUnit;
  op.m_ = a.rows();
  op.n_ = a.cols();
  op.explicit_ = true;
  op.matrix_ = std::move(a);
  return op;
}

Vector LinearOperator::apply(const Eigen::Ref<const Vector>& x) const {
  if (x.size() != n_) {
    throw DimensionError("apply: expected length " + std::to_string(n_) + ", got " + std::to_string(x.size()));
  }
  if (kind_ != OperatorKind::kPartialDct || explicit_) return matrix_ * x;
  const Vector full = dct2(x);
  Vector y(m_);
  for (Eigen::Index i = 0; i < m_; ++i) y(i) = full(rows_[static_cast<std::size_t>(i)]);
  return y;
}

Vector LinearOperator::adjoint(const Eigen::Ref<const Vector>& y) const {
  if (y.size() != m_) {
    throw DimensionError("adjoint: expected length " + std::to_string(m_) + ", got " + std::to_string(y.size()));
  }
  if (kind_ != OperatorKind::kPartialDct || explicit_) return matrix_.transpose() * y;
  Vector coeffs = Vector::Zero(n_);
  for (Eigen::Index i = 0; i < m_; ++i) coeffs(rows_[static_cast<std::size_t>(i)]) = y(i);
  return idct2(coeffs);
}

double LinearOperator::entry_variance() const noexcept {
  const double nn = static_cast<double>(n_);
  switch (kind_) {
    case OperatorKind::kGaussianOverN: return sigma_a_ * sigma_a_ / nn;
    case OperatorKind::kPartialDct: return 1.0 / nn;
    default: return sigma_a_ * sigma_a_;
  }
}

double LinearOperator::default_step() const noexcept {
  return 1.0 / (static_cast<double>(m_) * entry_variance());
}

Matrix LinearOperator::dense() const {
  if (kind_ != OperatorKind::kPartialDct || explicit_) return matrix_;
  const Matrix full = dct_matrix(n_);
  Matrix a(m_, n_);
  for (Eigen::Index i = 0; i < m_; ++i) a.row(i) = full.row(rows_[static_cast<std::size_t>(i)]);
  return a;
}

std::string LinearOperator::to_record() const {
  if (explicit_) throw ConfigError("to_record: explicit matrices carry no regenerable metadata");
  nlohmann::json j;
  j["kind"] = std::string(to_string(kind_));
  j["m"] = m_;
  j["n"] = n_;
  j["sigma_a"] = sigma_a_;
  j["seed"] = seed_;
  j["rng"] = std::string(SeededRng::algorithm());
  if (kind_ == OperatorKind::kPartialDct) {
    j["row_selection"] = "uniform-without-replacement";
    j["row_index_set"] = rows_;
  }
  return j.dump(2);
}

LinearOperator LinearOperator::from_record(std::string_view record) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(record);
    auto op = sample(parse_operator_kind(j.at("kind").get<std::string>()), j.at("m").get<Eigen::Index>(),
                     j.at("n").get<Eigen::Index>(), j.at("sigma_a").get<double>(), j.at("seed").get<std::uint64_t>());
    if (j.contains("row_index_set") && j["row_index_set"].get<std::vector<Eigen::Index>>() != op.rows_) {
      throw ConfigError("operator record: row_index_set does not match the regenerated operator");
    }
    return op;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("operator record: ") + e.what());
  }
}

SpectralNormEstimate spectral_norm(const LinearOperator& op, int max_iters, double tol) {
  if (max_iters < 1) throw DomainError("spectral_norm: max_iters must be >= 1");
  if (!(tol > 0.0)) throw DomainError("spectral_norm: tol must be > 0");

  SeededRng rng(derive_seed(op.seed(), "power-iteration"));
  Vector v = rng.unit_vector(op.cols());
  SpectralNormEstimate est;
  double previous = 0.0;
  for (int it = 1; it <= max_iters; ++it) {
    const Vector av = op.apply(v);
    const double sigma = av.norm();
    est.value = std::max(est.value, sigma);
    est.iterations = it;
    if (it > 1 && std::abs(sigma - previous) <= tol * sigma) {
      est.converged = true;
      break;
    }
    previous = sigma;
    Vector w = op.adjoint(av);
    const double wn = w.norm();
    if (wn == 0.0) {  // A v = 0 exactly; nothing left to amplify
      est.converged = true;
      break;
    }
    v = w / wn;
  }
  return est;
}

NoisyMeasurement add_noise_at_snr(const Eigen::Ref<const Vector>& y_clean, const NoiseSpec& spec) {
  NoisyMeasurement out;
  if (std::isinf(spec.snr_db) && spec.snr_db > 0) {
    out.y = y_clean;
    out.noise = Vector::Zero(y_clean.size());
    return out;
  }
  if (!std::isfinite(spec.snr_db)) throw DomainError("add_noise_at_snr: snr_db must be finite or +inf");
  const double clean_norm = y_clean.norm();
  if (clean_norm == 0.0) throw DegenerateInputError("add_noise_at_snr: zero clean measurement with finite SNR");

  SeededRng rng(derive_seed(spec.seed, "noise"));
  Vector g = rng.normal_vector(y_clean.size());
  double gn = g.norm();
  while (gn == 0.0) {
    g = rng.normal_vector(y_clean.size());
    gn = g.norm();
  }
  out.sigma_z = clean_norm / (gn * std::pow(10.0, spec.snr_db / 20.0));
  out.noise = out.sigma_z * g;
  out.y = y_clean + out.noise;
  return out;
}

}  // namespace cgd
