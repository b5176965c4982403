// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "cgd/generators.hpp"
#include "cgd/operator.hpp"
#include "cgd/parallel.hpp"
#include "cgd/poly_code.hpp"
#include "cgd/polyfit.hpp"
#include "cgd/rng.hpp"
#include "cgd/solver.hpp"
#include "cgd/sparse_code.hpp"
#include "cgd/theory.hpp"
#include "experiment.hpp"

namespace fs = std::filesystem;
using namespace cgd;

namespace {

constexpr std::uint64_t kSeed = 20240601;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_failures = 0;

void criterion(const std::string& name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs < limit_s;
  const bool pass = out.pass && in_time;
  if (!pass) ++g_failures;
  std::printf("%s %-28s %s [%.2f s / limit %.0f s%s]\n", pass ? "PASS" : "FAIL", name.c_str(), out.detail.c_str(),
              secs, limit_s, in_time ? "" : ", over time");
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

Outcome dp_oracle() {
  SeededRng rng(derive_seed(kSeed, "dp"));
  double worst = 0.0;
  int bad = 0;
  for (int i = 0; i < 200; ++i) {
    const auto n = static_cast<Eigen::Index>(2 + rng.uniform_index(11));
    const int N = static_cast<int>(rng.uniform_index(2));
    const int Q = static_cast<int>(rng.uniform_index(3));
    // Half class members, half arbitrary vectors in [-1, 1].
    Vector x = i % 2 ? random_poly_signal(n, N, Q, rng) : Vector(n);
    if (i % 2 == 0) {
      for (Eigen::Index j = 0; j < n; ++j) x[j] = rng.uniform(-1.0, 1.0);
    }
    const double dp = viterbi_segmentation(x, N, Q).total_error;
    const double bf = brute_force_segmentation(x, N, Q).total_error;
    const double diff = std::abs(dp - bf);
    worst = std::max(worst, diff);
    if (diff > 1e-9) ++bad;
  }
  return {bad == 0, "200 instances, mismatches " + std::to_string(bad) + ", max |dp-bf| " + fmt("%.3g", worst)};
}

Outcome quantizer_bounds(unsigned jobs) {
  const int count = 10000;
  const SparseQuantCode sparse(SparseQuantParams{256, 5, 7, std::nullopt});
  const PiecewisePolyCode poly(PiecewisePolyParams{64, 1, 1, 12, std::nullopt});
  std::vector<double> sparse_ratio(count), poly_ratio(count);
  parallel_for(static_cast<std::size_t>(count), jobs, [&](std::size_t i) {
    SeededRng rs(derive_seed(kSeed, "quant-sparse", i));
    const Vector xs = random_sparse_signal(256, 5, rs);
    sparse_ratio[i] = (xs - sparse.project(xs)).norm() / sparse.distortion_bound();
    SeededRng rp(derive_seed(kSeed, "quant-poly", i));
    const Vector xp = random_poly_signal(64, 1, 1, rp);
    poly_ratio[i] = (xp - poly.project(xp)).norm() / poly.distortion_bound();
  });
  const auto sv = std::count_if(sparse_ratio.begin(), sparse_ratio.end(), [](double r) { return r > 1.0; });
  const auto pv = std::count_if(poly_ratio.begin(), poly_ratio.end(), [](double r) { return r > 1.0; });
  const double smax = *std::max_element(sparse_ratio.begin(), sparse_ratio.end());
  const double pmax = *std::max_element(poly_ratio.begin(), poly_ratio.end());
  return {sv == 0 && pv == 0, "violations sparse " + std::to_string(sv) + " poly " + std::to_string(pv) +
                                  ", max err/bound " + fmt("%.3f", smax) + " / " + fmt("%.3f", pmax)};
}

Outcome oversampled(unsigned jobs) {
  const Eigen::Index n = 32;
  const auto params = SparseQuantParams::from_gamma(n, 1, 0.6);
  const SparseQuantCode code(params);
  const double r_tilde = *sparse_rate_report(params).rate_bound;
  const auto m = static_cast<Eigen::Index>(std::ceil(80.0 * r_tilde));
  const double delta = code.distortion_bound();
  const int trials = 100;
  std::vector<int> ok(trials, 0);
  std::vector<double> worst_margin(trials, 0.0);
  parallel_for(static_cast<std::size_t>(trials), jobs, [&](std::size_t t) {
    SeededRng rng(derive_seed(kSeed, "contraction-signal", t));
    const Vector x = random_sparse_signal(n, 1, rng);
    const auto op = LinearOperator::sample(OperatorKind::kGaussianUnit, m, n, 1.0, derive_seed(kSeed, "contraction-op", t));
    const Vector y = op.apply(x);
    CgdConfig cfg;
    cfg.k1_max = 50;
    cfg.eps_t = 1e-9;
    const auto res = cgd_run(y, op, code, cfg, x);
    const double scale = std::sqrt(static_cast<double>(n));
    bool good = true;
    double margin = -1e300;
    const auto& recs = res.trace.records;
    for (std::size_t k = 0; k + 1 < recs.size(); ++k) {
      const double prev = *recs[k].ref_err_tilde * scale;
      const double next = *recs[k + 1].ref_err_tilde * scale;
      const double bound = theorem2_step_bound(prev, delta, double(m), double(n), r_tilde, 0.0, 0.0, 1.0);
      margin = std::max(margin, next - bound);
      if (next > bound) good = false;
    }
    ok[t] = good ? 1 : 0;
    worst_margin[t] = margin;
  });
  const int passed = std::accumulate(ok.begin(), ok.end(), 0);
  const double wm = *std::max_element(worst_margin.begin(), worst_margin.end());
  return {passed >= 99, "m=" + std::to_string(m) + " (r~=" + fmt("%.4g", r_tilde) + "), " + std::to_string(passed) +
                            "/100 trials hold, max (lhs - rhs) " + fmt("%.3g", wm)};
}

cli::ExperimentConfig sparse_benchmark(Eigen::Index m, double snr_db, int trials, std::uint64_t seed) {
  cli::ExperimentConfig c;
  c.signal = cli::SignalSpec{cli::SparseSignalSpec{256, 5}, false};
  cli::OperatorSpec op;
  op.kind = OperatorKind::kGaussianOverN;
  op.m = m;
  c.op = op;
  c.code = cli::SparseCodeSpec{5, 7, std::nullopt};
  c.snr_db = snr_db;
  c.solver.step_mode = StepMode::kAdaptive;
  c.solver.k1_max = 50;
  c.solver.eps_t = 1e-3;
  c.trials = trials;
  c.seed = seed;
  return c;
}

std::vector<cli::TrialResult> run_trials(const cli::ExperimentConfig& c, unsigned jobs) {
  const auto code = cli::make_code(*c.code, 256);
  std::vector<cli::TrialResult> out(static_cast<std::size_t>(c.trials));
  parallel_for(out.size(), jobs, [&](std::size_t i) { out[i] = cli::run_trial(c, *code, static_cast<int>(i)); });
  return out;
}

Outcome undersampled(unsigned jobs) {
  const auto m = static_cast<Eigen::Index>(std::ceil(6.0 * 5.0 * std::log2(256.0 / 5.0)));
  const auto results = run_trials(sparse_benchmark(m, std::numeric_limits<double>::infinity(), 20,
                                                   derive_seed(kSeed, "undersampled")),
                                  jobs);
  const double delta = std::ldexp(1.0, -7) * std::sqrt(5.0);
  const double target = 2.0 * delta / 16.0;
  int hits = 0;
  std::vector<double> errs;
  for (const auto& r : results) {
    errs.push_back(r.ref_err_tilde);
    if (r.ref_err_tilde <= target) ++hits;
  }
  return {m == 171 && hits >= 18, "m=" + std::to_string(m) + ", " + std::to_string(hits) +
                                      "/20 within 2 delta/sqrt n = " + fmt("%.4g", target) + ", median err " +
                                      fmt("%.3g", median(errs))};
}

Outcome noise_floor(unsigned jobs) {
  const Eigen::Index m = 171;
  const std::uint64_t seed = derive_seed(kSeed, "noise-floor");
  auto final_errors = [&](Eigen::Index mm) {
    std::vector<double> e;
    for (const auto& r : run_trials(sparse_benchmark(mm, 20.0, 50, seed), jobs)) e.push_back(r.ref_err_tilde);
    return median(e);
  };
  const double e1 = final_errors(m);
  const double e2 = final_errors(2 * m);
  const double ratio = e2 / e1;
  return {ratio >= 0.5 && ratio <= 0.9, "median err m " + fmt("%.4g", e1) + ", 2m " + fmt("%.4g", e2) +
                                            ", ratio " + fmt("%.3f", ratio) + " (want [0.5, 0.9])"};
}

Outcome csp_dominance() {
  const SparseQuantCode code(SparseQuantParams{8, 1, 2, std::nullopt});
  const auto book = enumerate_codebook(code);
  int bad = 0;
  double worst = -1e300;
  for (int t = 0; t < 50; ++t) {
    SeededRng rng(derive_seed(kSeed, "csp-signal", t));
    const Vector x = random_sparse_signal(8, 1, rng);
    const auto op = LinearOperator::sample(OperatorKind::kGaussianUnit, 4, 8, 1.0, derive_seed(kSeed, "csp-op", t));
    const Vector y = op.apply(x);
    const auto csp = csp_exhaustive(y, op, book);
    CgdConfig cfg;
    cfg.k1_max = 50;
    const auto res = cgd_run(y, op, code, cfg);
    const double cgd_residual = (y - op.apply(res.x_hat)).norm();
    worst = std::max(worst, csp.residual - cgd_residual);
    if (csp.residual > cgd_residual) ++bad;
  }
  return {bad == 0, std::to_string(book.size()) + " codewords, 50 instances, violations " + std::to_string(bad) +
                        ", max (csp - cgd) " + fmt("%.3g", worst)};
}

Outcome concentration(unsigned jobs) {
  struct Case {
    std::string name;
    std::map<std::string, double> params;
  };
  std::vector<Case> cases;
  for (const char* which : {"lemma7_lower", "lemma7_upper"}) {
    for (double m : {10.0, 50.0}) {
      for (double tau : {0.3, 0.5}) cases.push_back({which, {{"m", m}, {"tau", tau}}});
    }
  }
  cases.push_back({"corollary2_sigma_max", {{"m", 20}, {"n", 50}, {"t", 1}}});
  cases.push_back({"lemma10_subgauss", {{"m", 400}, {"t", 0.45}}});
  const std::int64_t trials = 2000;
  int passed = 0;
  std::string failed;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto rep = tail_check(cases[i].name, cases[i].params, trials, derive_seed(kSeed, "tail", i), jobs);
    if (rep.pass) {
      ++passed;
    } else {
      failed += " " + cases[i].name + fmt("(emp %.4g", rep.empirical_value) + fmt(" > %.4g)", rep.theoretical_bound);
    }
  }
  return {passed == static_cast<int>(cases.size()),
          std::to_string(passed) + "/" + std::to_string(cases.size()) + " checks at " + std::to_string(trials) +
              " trials" + failed};
}

Outcome fstar() {
  const double f45 = eval_fstar(0.45);
  const double f0 = eval_fstar(0.0);
  const bool ok = f45 >= std::log(2.0) / 20.0 - 1e-4 && f0 <= 1e-6;
  return {ok, "f*(0.45) = " + fmt("%.6f", f45) + " (ln2/20 = " + fmt("%.6f", std::log(2.0) / 20.0) +
                  "), f*(0) = " + fmt("%.2g", f0)};
}

Outcome adjoint() {
  const Eigen::Index m = 24, n = 64;
  double worst = 0.0;
  for (auto kind : {OperatorKind::kGaussianUnit, OperatorKind::kGaussianOverN, OperatorKind::kRademacher,
                    OperatorKind::kPartialDct}) {
    for (int p = 0; p < 100; ++p) {
      const auto op = LinearOperator::sample(kind, m, n, 1.0, derive_seed(kSeed, "adj-op", p));
      SeededRng rng(derive_seed(kSeed, "adj-probe", p));
      const Vector x = rng.normal_vector(n);
      const Vector y = rng.normal_vector(m);
      worst = std::max(worst, std::abs(op.apply(x).dot(y) - x.dot(op.adjoint(y))));
    }
  }
  double ortho = 0.0;
  for (Eigen::Index mm : {1, 7, 24, 64}) {
    const auto op = LinearOperator::sample(OperatorKind::kPartialDct, mm, n, 1.0, derive_seed(kSeed, "adj-dct", mm));
    const Matrix a = op.dense();
    ortho = std::max(ortho, (a * a.transpose() - Matrix::Identity(mm, mm)).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-10 && ortho <= 1e-10,
          "max |<Ax,y>-<x,A'y>| " + fmt("%.2g", worst) + ", max |AA'-I| " + fmt("%.2g", ortho)};
}

Outcome determinism(unsigned jobs) {
  cli::ExperimentConfig c = sparse_benchmark(0, 20.0, 3, kSeed);
  c.op->m.reset();
  c.op->ratio = 0.5;
  c.signal = cli::SignalSpec{cli::SparseSignalSpec{64, 3}, false};
  c.code = cli::SparseCodeSpec{3, 6, std::nullopt};
  c.solver.k1_max = 10;
  c.sweep = cli::SweepSpec{{0.25, 0.5}, {10.0, std::numeric_limits<double>::infinity()}};
  const fs::path root = fs::temp_directory_path() / ("cgd_acceptance_" + std::to_string(::getpid()));
  auto read = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  cli::cmd_sweep(c, {root / "a", 1, true});
  cli::cmd_sweep(c, {root / "b", jobs, true});
  const auto a = read(root / "a" / "sweep.csv");
  const auto b = read(root / "b" / "sweep.csv");
  fs::remove_all(root);
  const auto rows = std::count(a.begin(), a.end(), '\n');
  return {!a.empty() && a == b, "sweep.csv " + std::to_string(a.size()) + " bytes, " + std::to_string(rows) +
                                    " lines, " + (a == b ? "identical" : "DIFFERENT")};
}

}  // namespace

int main() {
  const unsigned jobs = resolve_jobs(0);
  criterion("dp_oracle_equivalence", 10, dp_oracle);
  criterion("quantizer_distortion_bounds", 30, [&] { return quantizer_bounds(jobs); });
  criterion("oversampled_contraction", 120, [&] { return oversampled(jobs); });
  criterion("undersampled_recovery", 60, [&] { return undersampled(jobs); });
  criterion("noise_floor_scaling", 180, [&] { return noise_floor(jobs); });
  criterion("csp_dominance", 10, csp_dominance);
  criterion("concentration_suite", 120, [&] { return concentration(jobs); });
  criterion("fstar_consistency", 5, fstar);
  criterion("adjoint_orthonormality", 5, adjoint);
  criterion("sweep_determinism", 60, [&] { return determinism(jobs); });
  std::printf("%s: %d failing criteria\n", g_failures ? "FAIL" : "PASS", g_failures);
  return g_failures ? 1 : 0;
}
