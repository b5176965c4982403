#include "cgd/theory.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <json.hpp>
#include <numbers>
#include <set>

#include "cgd/error.hpp"
#include "cgd/parallel.hpp"
#include "cgd/rng.hpp"

namespace cgd {

double mu_coefficient(const Eigen::Ref<const Vector>& u, const Eigen::Ref<const Vector>& v, double eta,
                      const LinearOperator& op) {
  if (u.size() != op.cols() || v.size() != op.cols()) throw DimensionError("mu_coefficient: length mismatch");
  if (std::abs(u.norm() - 1.0) > 1e-9 || std::abs(v.norm() - 1.0) > 1e-9) {
    throw DomainError("mu_coefficient: u and v must have unit norm");
  }
  return u.dot(v) - eta * op.apply(u).dot(op.apply(v));
}

double theorem2_step_bound(double prev_err, double delta, double m, double n, double r, double eps, double sigma_z,
                           double sigma_a) {
  if (!(m >= 1.0 && n >= 1.0)) throw DomainError("theorem2_step_bound: m and n must be >= 1");
  if (prev_err < 0 || delta < 0 || r < 0 || eps < 0 || sigma_z < 0 || !(sigma_a > 0)) {
    throw DomainError("theorem2_step_bound: inputs must be nonnegative and sigma_a > 0");
  }
  const double c = 2.0 + std::sqrt(n / m);
  return 0.9 * prev_err + 2.0 * c * c * delta + (sigma_z / sigma_a) * std::sqrt(8.0 * (1.0 + eps) * r / m);
}

SubGaussianStepBound theorem4_step_bound(double prev_err, double mu0, double K, double delta, double m, double n,
                                         double r, double eps, double sigma_z, double sigma_a) {
  if (!(mu0 > 0.0 && mu0 < 1.0)) throw DomainError("theorem4_step_bound: mu0 must lie in (0, 1)");
  if (!(K > 0.0 && sigma_a > 0.0)) throw DomainError("theorem4_step_bound: K and sigma_a must be > 0");
  if (mu0 * sigma_a * sigma_a > 2.0 * K * K) throw DomainError("theorem4_step_bound: mu0 sigma_a^2 > 2 K^2");
  if (!(m >= 1.0 && n >= 1.0)) throw DomainError("theorem4_step_bound: m and n must be >= 1");
  if (prev_err < 0 || delta < 0 || r < 0 || eps < 0 || sigma_z < 0) {
    throw DomainError("theorem4_step_bound: inputs must be nonnegative");
  }
  const double sa2 = sigma_a * sigma_a;
  SubGaussianStepBound b;
  b.distortion_coefficient = 8.0 * (1.0 + 3.0 * K * n / (sa2 * m));
  b.noise_coefficient = (9.0 * K * sigma_z / sa2) * std::sqrt(r * (1.0 + eps) / m);
  b.value = mu0 * prev_err + b.distortion_coefficient * delta + b.noise_coefficient;
  b.required_m = 16.0 * std::pow(K, 4) * (1.0 + eps) * r / (mu0 * mu0 * sa2 * sa2 * std::numbers::log2e);
  return b;
}

double fstar_objective(double t, double u, double s) {
  const double a = 1.0 + s * u;
  const double q = a * a - s * s;
  if (!(q > 0.0)) return -std::numeric_limits<double>::infinity();
  return s * (t - u) + 0.5 * std::log(q);
}

namespace {

constexpr double kInvPhi = 0.6180339887498949;

/// Minimizes f on [lo, hi] by grid search then golden-section in the winning bracket.
std::pair<double, double> grid_golden_min(const std::function<double(double)>& f, double lo, double hi, int grid) {
  double best_x = lo;
  double best_f = f(lo);
  int best_i = 0;
  for (int i = 1; i <= grid; ++i) {
    const double x = lo + (hi - lo) * i / grid;
    const double fx = f(x);
    if (fx < best_f) {
      best_f = fx;
      best_x = x;
      best_i = i;
    }
  }
  double a = lo + (hi - lo) * std::max(0, best_i - 1) / grid;
  double b = lo + (hi - lo) * std::min(grid, best_i + 1) / grid;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < 200 && (b - a) > 1e-13 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  for (const auto& [x, fx] : {std::pair{c, fc}, std::pair{d, fd}}) {
    if (fx < best_f) {
      best_f = fx;
      best_x = x;
    }
  }
  return {best_x, best_f};
}

double fstar_inner(double t, double u) {
  const double hi = (1.0 - 1e-9) / (1.0 - u);
  const auto [s, neg] = grid_golden_min([&](double s) { return -fstar_objective(t, u, s); }, 0.0, hi, 64);
  return -neg;
}

}  // namespace

double eval_fstar(double t) {
  if (!(t >= 0.0)) throw DomainError("eval_fstar: t must be >= 0");
  return grid_golden_min([&](double u) { return fstar_inner(t, u); }, -1.0 + 1e-9, 1.0 - 1e-9, 200).second;
}

double rademacher_psi2(double sigma_a) { return sigma_a / std::sqrt(std::numbers::ln2); }

double binomial_slack(double bound, std::int64_t trials) {
  const double p = std::clamp(bound, 0.0, 1.0);
  return 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

std::string BoundReport::to_json() const {
  nlohmann::ordered_json j;
  j["name"] = name;
  j["params"] = params;
  j["theoretical_bound"] = theoretical_bound;
  j["empirical_value"] = empirical_value;
  j["trials"] = trials;
  j["slack"] = slack;
  j["pass"] = pass;
  return j.dump(2);
}

const std::vector<std::string>& tail_check_names() {
  static const std::vector<std::string> names = {"lemma7_lower", "lemma7_upper", "corollary2_sigma_max",
                                                 "lemma10_subgauss", "corollary6_gauss"};
  return names;
}

namespace {

struct CheckDef {
  std::map<std::string, double> defaults;
  std::function<double(const std::map<std::string, double>&)> bound;
  /// Returns true when trial i lands in the tail event.
  std::function<bool(const std::map<std::string, double>&, SeededRng&)> event;
};

Eigen::Index as_dim(double v, const char* what) {
  if (!(v >= 1.0) || v != std::floor(v) || v > 1e7) {
    throw ConfigError(std::string("tail_check: ") + what + " must be a positive integer");
  }
  return static_cast<Eigen::Index>(v);
}

double chi2_sum(Eigen::Index m, SeededRng& rng) { return rng.normal_vector(m).squaredNorm(); }

bool mu_event(const std::map<std::string, double>& p, SeededRng& rng, OperatorKind kind, double t) {
  const Eigen::Index m = as_dim(p.at("m"), "m");
  const Eigen::Index n = as_dim(p.at("n"), "n");
  const double sigma_a = p.at("sigma_a");
  const Vector u = rng.unit_vector(n);
  const Vector v = rng.unit_vector(n);
  const LinearOperator op = LinearOperator::sample(kind, m, n, sigma_a, rng.next_u64());
  const double eta = 1.0 / (static_cast<double>(m) * sigma_a * sigma_a);
  return mu_coefficient(u, v, eta, op) >= t;
}

const std::map<std::string, CheckDef>& registry() {
  static const std::map<std::string, CheckDef> defs = [] {
    std::map<std::string, CheckDef> d;
    d["lemma7_lower"] = {
        {{"m", 10}, {"tau", 0.5}},
        [](const auto& p) {
          const double m = p.at("m"), tau = p.at("tau");
          if (!(tau > 0.0 && tau < 1.0)) throw ConfigError("lemma7_lower: tau must lie in (0, 1)");
          return std::exp(m / 2.0 * (tau + std::log(1.0 - tau)));
        },
        [](const auto& p, SeededRng& rng) {
          const Eigen::Index m = as_dim(p.at("m"), "m");
          return chi2_sum(m, rng) <= static_cast<double>(m) * (1.0 - p.at("tau"));
        }};
    d["lemma7_upper"] = {
        {{"m", 10}, {"tau", 0.5}},
        [](const auto& p) {
          const double m = p.at("m"), tau = p.at("tau");
          if (!(tau > 0.0)) throw ConfigError("lemma7_upper: tau must be > 0");
          return std::exp(-m / 2.0 * (tau - std::log(1.0 + tau)));
        },
        [](const auto& p, SeededRng& rng) {
          const Eigen::Index m = as_dim(p.at("m"), "m");
          return chi2_sum(m, rng) >= static_cast<double>(m) * (1.0 + p.at("tau"));
        }};
    d["corollary2_sigma_max"] = {
        {{"m", 20}, {"n", 50}, {"t", 1}},
        [](const auto& p) {
          const double m = p.at("m"), t = p.at("t");
          if (!(t > 0.0)) throw ConfigError("corollary2_sigma_max: t must be > 0");
          return std::exp(-m * t * t / 2.0);
        },
        [](const auto& p, SeededRng& rng) {
          const Eigen::Index m = as_dim(p.at("m"), "m");
          const Eigen::Index n = as_dim(p.at("n"), "n");
          const auto op = LinearOperator::sample(OperatorKind::kGaussianUnit, m, n, 1.0, rng.next_u64());
          const double smax = spectral_norm(op, 10000, 1e-13).value;
          return smax >= (1.0 + p.at("t")) * std::sqrt(static_cast<double>(m)) + std::sqrt(static_cast<double>(n));
        }};
    d["lemma10_subgauss"] = {
        {{"m", 400}, {"n", 50}, {"t", 0.45}, {"sigma_a", 1}},
        [](const auto& p) {
          const double m = p.at("m"), t = p.at("t"), sa = p.at("sigma_a");
          if (!(t > 0.0 && sa > 0.0)) throw ConfigError("lemma10_subgauss: t and sigma_a must be > 0");
          const double k = rademacher_psi2(sa);
          const double ratio = t * sa * sa / (2.0 * k * k);
          return std::exp(-(m * ratio) * std::min(1.0, ratio));
        },
        [](const auto& p, SeededRng& rng) { return mu_event(p, rng, OperatorKind::kRademacher, p.at("t")); }};
    d["corollary6_gauss"] = {
        {{"m", 400}, {"n", 20}, {"sigma_a", 1}},
        [](const auto& p) {
          if (!(p.at("sigma_a") > 0.0)) throw ConfigError("corollary6_gauss: sigma_a must be > 0");
          return std::exp2(-p.at("m") / 20.0);
        },
        [](const auto& p, SeededRng& rng) { return mu_event(p, rng, OperatorKind::kGaussianUnit, 0.45); }};
    return d;
  }();
  return defs;
}

}  // namespace

BoundReport tail_check(std::string_view which, const std::map<std::string, double>& params, std::int64_t trials,
                       std::uint64_t seed, unsigned jobs) {
  const auto& defs = registry();
  const auto it = defs.find(std::string(which));
  if (it == defs.end()) throw ConfigError("unknown theory check '" + std::string(which) + "'");
  if (trials < 100) throw ConfigError("tail_check: trials must be >= 100");
  const CheckDef& def = it->second;

  std::map<std::string, double> p = def.defaults;
  for (const auto& [key, value] : params) {
    if (!p.contains(key)) throw ConfigError("tail_check: unknown parameter '" + key + "' for " + it->first);
    p[key] = value;
  }
  BoundReport report;
  report.name = it->first;
  report.params = p;
  report.trials = trials;
  report.theoretical_bound = def.bound(p);

  std::vector<char> hit(static_cast<std::size_t>(trials), 0);
  parallel_for(hit.size(), jobs, [&](std::size_t i) {
    SeededRng rng(derive_seed(seed, report.name, i));
    hit[i] = def.event(p, rng) ? 1 : 0;
  });
  const auto count = std::count(hit.begin(), hit.end(), 1);
  report.empirical_value = static_cast<double>(count) / static_cast<double>(trials);
  report.slack = binomial_slack(report.theoretical_bound, trials);
  report.pass = report.empirical_value <= report.theoretical_bound + report.slack;
  return report;
}

}  // namespace cgd
