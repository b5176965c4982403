#include "experiment.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "cgd/generators.hpp"
#include "cgd/io.hpp"
#include "cgd/parallel.hpp"

namespace cgd::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double_field(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw ConfigError("bad number '" + s + "'");
  return v;
}

namespace {

// ---- config parsing -------------------------------------------------------

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!ok.contains(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
T get(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + ": '" + key + "' has the wrong type");
  }
}

template <typename T>
std::optional<T> get_opt(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return get<T>(j, key, where);
}

Eigen::Index get_positive_index(const json& j, const char* key, const std::string& where) {
  const auto v = get<std::int64_t>(j, key, where);
  if (v < 1) throw ConfigError(where + ": '" + key + "' must be >= 1");
  return static_cast<Eigen::Index>(v);
}

int get_nonneg_int(const json& j, const char* key, const std::string& where) {
  const auto v = get<std::int64_t>(j, key, where);
  if (v < 0 || v > 1'000'000) throw ConfigError(where + ": '" + key + "' out of range");
  return static_cast<int>(v);
}

/// A dB value: a number, or "inf" / null for noiseless.
double parse_snr(const json& v, const std::string& where) {
  if (v.is_null()) return std::numeric_limits<double>::infinity();
  if (v.is_string() && v.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
  if (v.is_number()) return v.get<double>();
  throw ConfigError(where + ": snr must be a number or \"inf\"");
}

json snr_to_json(double v) { return std::isinf(v) ? json("inf") : json(v); }

json finite_or_string(double v) { return std::isfinite(v) ? json(v) : json(format_double(v)); }

SignalSpec parse_signal(const json& j) {
  const std::string where = "signal";
  const auto type = get<std::string>(j, "type", where);
  SignalSpec s;
  if (type == "sparse") {
    check_keys(j, {"type", "n", "k", "codeword"}, where);
    SparseSignalSpec sp{get_positive_index(j, "n", where), get_positive_index(j, "k", where)};
    if (sp.k > sp.n) throw ConfigError("signal: k must be <= n");
    s.source = sp;
  } else if (type == "piecewise-poly") {
    check_keys(j, {"type", "n", "N", "Q", "codeword"}, where);
    s.source = PolySignalSpec{get_positive_index(j, "n", where), get_nonneg_int(j, "N", where),
                              get_nonneg_int(j, "Q", where)};
  } else if (type == "file") {
    check_keys(j, {"type", "path", "codeword"}, where);
    s.source = FileSignalSpec{get<std::string>(j, "path", where)};
  } else {
    throw ConfigError("signal: unknown type '" + type + "'");
  }
  s.codeword = get_opt<bool>(j, "codeword", where).value_or(false);
  return s;
}

OperatorSpec parse_operator(const json& j) {
  const std::string where = "operator";
  check_keys(j, {"kind", "m", "ratio", "sigma_a", "seed"}, where);
  OperatorSpec op;
  op.kind = parse_operator_kind(get<std::string>(j, "kind", where));
  if (j.contains("m")) op.m = get_positive_index(j, "m", where);
  op.ratio = get_opt<double>(j, "ratio", where);
  if (op.m.has_value() == op.ratio.has_value()) throw ConfigError("operator: give exactly one of 'm' and 'ratio'");
  if (op.ratio && !(*op.ratio > 0.0 && *op.ratio <= 1.0)) throw ConfigError("operator: ratio must lie in (0, 1]");
  op.sigma_a = get_opt<double>(j, "sigma_a", where).value_or(1.0);
  if (!(op.sigma_a > 0.0)) throw ConfigError("operator: sigma_a must be > 0");
  op.seed = get_opt<std::uint64_t>(j, "seed", where);
  return op;
}

CodeSpec parse_code(const json& j) {
  const std::string where = "code";
  const auto type = get<std::string>(j, "type", where);
  auto bits = [&]() {
    auto b = get_opt<std::int64_t>(j, "b", where);
    auto g = get_opt<double>(j, "gamma", where);
    if (b.has_value() == g.has_value()) throw ConfigError("code: give exactly one of 'b' and 'gamma'");
    if (b && (*b < 1 || *b > 52)) throw ConfigError("code: b must lie in [1, 52]");
    if (g && !(*g >= 0.0)) throw ConfigError("code: gamma must be >= 0");
    return std::pair{b ? std::optional<int>(static_cast<int>(*b)) : std::nullopt, g};
  };
  if (type == "sparse") {
    check_keys(j, {"type", "k", "b", "gamma"}, where);
    const auto [b, g] = bits();
    return SparseCodeSpec{get_positive_index(j, "k", where), b, g};
  }
  if (type == "poly") {
    check_keys(j, {"type", "N", "Q", "b", "gamma"}, where);
    const auto [b, g] = bits();
    return PolyCodeSpec{get_nonneg_int(j, "N", where), get_nonneg_int(j, "Q", where), b, g};
  }
  if (type == "external") {
    check_keys(j, {"type", "encode", "decode", "format", "timeout_s", "image_width", "pixel_scale", "temp_dir"},
               where);
    ExternalCodecSpec e;
    e.encode_command = get<std::string>(j, "encode", where);
    e.decode_command = get<std::string>(j, "decode", where);
    e.format = parse_exchange_format(get_opt<std::string>(j, "format", where).value_or("f64v"));
    e.timeout_seconds = get_opt<double>(j, "timeout_s", where).value_or(30.0);
    e.image_width = static_cast<int>(get_opt<std::int64_t>(j, "image_width", where).value_or(0));
    e.pixel_scale = get_opt<double>(j, "pixel_scale", where).value_or(255.0);
    e.temp_dir = get_opt<std::string>(j, "temp_dir", where).value_or("");
    return e;
  }
  throw ConfigError("code: unknown type '" + type + "'");
}

CgdConfig parse_solver(const json& j) {
  const std::string where = "solver";
  check_keys(j, {"step_mode", "eta", "k1_max", "k2_max", "eps_t", "x0_mode"}, where);
  CgdConfig c;
  if (auto s = get_opt<std::string>(j, "step_mode", where)) c.step_mode = parse_step_mode(*s);
  c.eta = get_opt<double>(j, "eta", where);
  if (j.contains("k1_max")) c.k1_max = get_nonneg_int(j, "k1_max", where);
  if (j.contains("k2_max")) c.k2_max = get_nonneg_int(j, "k2_max", where);
  if (auto e = get_opt<double>(j, "eps_t", where)) c.eps_t = *e;
  if (auto s = get_opt<std::string>(j, "x0_mode", where)) c.x0_mode = parse_init_mode(*s);
  c.validate();
  return c;
}

json signal_to_json(const SignalSpec& s) {
  json j;
  if (const auto* sp = std::get_if<SparseSignalSpec>(&s.source)) {
    j = {{"type", "sparse"}, {"n", sp->n}, {"k", sp->k}};
  } else if (const auto* pp = std::get_if<PolySignalSpec>(&s.source)) {
    j = {{"type", "piecewise-poly"}, {"n", pp->n}, {"N", pp->max_degree}, {"Q", pp->max_singularities}};
  } else {
    j = {{"type", "file"}, {"path", std::get<FileSignalSpec>(s.source).path.string()}};
  }
  j["codeword"] = s.codeword;
  return j;
}

json code_to_json(const CodeSpec& c) {
  json j;
  auto put_bits = [&](const std::optional<int>& b, const std::optional<double>& g) {
    if (b) j["b"] = *b;
    if (g) j["gamma"] = *g;
  };
  if (const auto* s = std::get_if<SparseCodeSpec>(&c)) {
    j = {{"type", "sparse"}, {"k", s->k}};
    put_bits(s->b, s->gamma);
  } else if (const auto* p = std::get_if<PolyCodeSpec>(&c)) {
    j = {{"type", "poly"}, {"N", p->max_degree}, {"Q", p->max_singularities}};
    put_bits(p->b, p->gamma);
  } else {
    const auto& e = std::get<ExternalCodecSpec>(c);
    j = {{"type", "external"},          {"encode", e.encode_command},     {"decode", e.decode_command},
         {"format", to_string(e.format)}, {"timeout_s", e.timeout_seconds}, {"image_width", e.image_width},
         {"pixel_scale", e.pixel_scale}};
  }
  return j;
}

json config_json(const ExperimentConfig& c) {
  json j;
  if (c.signal) j["signal"] = signal_to_json(*c.signal);
  if (c.op) {
    json o = {{"kind", to_string(c.op->kind)}, {"sigma_a", c.op->sigma_a}};
    if (c.op->m) o["m"] = *c.op->m;
    if (c.op->ratio) o["ratio"] = *c.op->ratio;
    if (c.op->seed) o["seed"] = *c.op->seed;
    j["operator"] = o;
  }
  if (c.code) j["code"] = code_to_json(*c.code);
  j["noise"] = {{"snr_db", snr_to_json(c.snr_db)}};
  json s = {{"step_mode", to_string(c.solver.step_mode)}, {"k1_max", c.solver.k1_max},
            {"k2_max", c.solver.k2_max},                   {"eps_t", c.solver.eps_t},
            {"x0_mode", to_string(c.solver.x0_mode)}};
  if (c.solver.eta) s["eta"] = *c.solver.eta;
  j["solver"] = s;
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  if (c.sweep) {
    json snrs = json::array();
    for (double v : c.sweep->snr_db) snrs.push_back(snr_to_json(v));
    j["sweep"] = {{"ratios", c.sweep->ratios}, {"snr_db", snrs}};
  }
  return j;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

std::string trial_name(int trial) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "trial_%03d.csv", trial);
  return buf;
}

Eigen::Index signal_length(const SignalSpec& s) {
  if (const auto* sp = std::get_if<SparseSignalSpec>(&s.source)) return sp->n;
  if (const auto* pp = std::get_if<PolySignalSpec>(&s.source)) return pp->n;
  return -1;
}

Vector read_signal_file(const fs::path& path) {
  if (path.extension() == ".pgm") return io::from_image(io::read_pgm(path), 255.0);
  return io::read_f64v(path);
}

double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  if (!std::isfinite(m)) return std::numeric_limits<double>::quiet_NaN();
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

const ExperimentConfig& require_run_fields(const ExperimentConfig& c, const char* what) {
  if (!c.signal) throw ConfigError(std::string(what) + ": config needs a 'signal' section");
  if (!c.op) throw ConfigError(std::string(what) + ": config needs an 'operator' section");
  if (!c.code) throw ConfigError(std::string(what) + ": config needs a 'code' section");
  return c;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j, {"signal", "operator", "code", "noise", "solver", "trials", "seed", "output", "sweep"}, "config");
  ExperimentConfig c;
  if (j.contains("signal")) c.signal = parse_signal(j["signal"]);
  if (j.contains("operator")) c.op = parse_operator(j["operator"]);
  if (j.contains("code")) c.code = parse_code(j["code"]);
  if (j.contains("noise")) {
    check_keys(j["noise"], {"snr_db"}, "noise");
    c.snr_db = parse_snr(j["noise"].value("snr_db", json()), "noise");
  }
  if (j.contains("solver")) c.solver = parse_solver(j["solver"]);
  if (j.contains("trials")) {
    c.trials = get_nonneg_int(j, "trials", "config");
    if (c.trials < 1) throw ConfigError("config: trials must be >= 1");
  }
  if (j.contains("seed")) c.seed = get<std::uint64_t>(j, "seed", "config");
  if (auto out = get_opt<std::string>(j, "output", "config")) c.output = *out;
  if (j.contains("sweep")) {
    const auto& s = j["sweep"];
    check_keys(s, {"ratios", "snr_db"}, "sweep");
    SweepSpec sw;
    sw.ratios = get<std::vector<double>>(s, "ratios", "sweep");
    if (!s.contains("snr_db") || !s["snr_db"].is_array()) throw ConfigError("sweep: 'snr_db' must be an array");
    for (const auto& v : s["snr_db"]) sw.snr_db.push_back(parse_snr(v, "sweep"));
    for (double r : sw.ratios) {
      if (!(r > 0.0 && r <= 1.0)) throw ConfigError("sweep: ratios must lie in (0, 1]");
    }
    c.sweep = sw;
  }
  if (c.signal && c.code && std::holds_alternative<SparseCodeSpec>(*c.code)) {
    const Eigen::Index n = signal_length(*c.signal);
    if (n > 0 && std::get<SparseCodeSpec>(*c.code).k > n) throw ConfigError("code: k must be <= n");
  }
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const ExperimentConfig& config) { return config_json(config).dump(2); }

Eigen::Index resolve_m(const OperatorSpec& op, Eigen::Index n) {
  if (op.m) return *op.m;
  return std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::ceil(*op.ratio * static_cast<double>(n) - 1e-9)));
}

std::unique_ptr<CompressionCode> make_code(const CodeSpec& spec, Eigen::Index n) {
  if (const auto* s = std::get_if<SparseCodeSpec>(&spec)) {
    if (s->k > n) throw ConfigError("code: k must be <= n");
    const auto p = s->gamma ? SparseQuantParams::from_gamma(n, s->k, *s->gamma) : SparseQuantParams{n, s->k, *s->b, {}};
    return std::make_unique<SparseQuantCode>(p);
  }
  if (const auto* p = std::get_if<PolyCodeSpec>(&spec)) {
    if (p->max_degree > 5) throw ConfigError("code: N must be <= 5");
    const auto params = p->gamma ? PiecewisePolyParams::from_gamma(n, p->max_degree, p->max_singularities, *p->gamma)
                                 : PiecewisePolyParams{n, p->max_degree, p->max_singularities, *p->b, {}};
    return std::make_unique<PiecewisePolyCode>(params);
  }
  ExternalCodecSpec e = std::get<ExternalCodecSpec>(spec);
  try {
    return std::make_unique<ExternalCodec>(n, e);
  } catch (const DomainError& err) {
    throw ConfigError(err.what());
  }
}

std::string signal_law(const SignalSpec& spec) {
  std::string law;
  if (std::holds_alternative<SparseSignalSpec>(spec.source)) {
    law = "sparse: support uniform over k-subsets; nonzero values uniform on [-1, 1]";
  } else if (std::holds_alternative<PolySignalSpec>(spec.source)) {
    law = "piecewise-poly: Q distinct singularities uniform in {1..n-1}; per-segment coefficients uniform on "
          "{a >= 0, sum a <= 1}; samples at t = i/n";
  } else {
    law = "file";
  }
  if (spec.codeword) law += "; projected onto the code";
  return law;
}

Instance make_instance(const ExperimentConfig& config, const CompressionCode* code, int trial) {
  require_run_fields(config, "run");
  const auto t = static_cast<std::uint64_t>(trial);
  Instance inst{Vector(), LinearOperator::from_dense(Matrix::Zero(1, 1)), {}, derive_seed(config.seed, "signal", t),
                derive_seed(config.seed, "noise", t)};
  SeededRng rng(inst.signal_seed);
  const auto& src = config.signal->source;
  if (const auto* sp = std::get_if<SparseSignalSpec>(&src)) {
    inst.x = random_sparse_signal(sp->n, sp->k, rng);
  } else if (const auto* pp = std::get_if<PolySignalSpec>(&src)) {
    inst.x = random_poly_signal(pp->n, pp->max_degree, pp->max_singularities, rng);
  } else {
    inst.x = read_signal_file(std::get<FileSignalSpec>(src).path);
  }
  const Eigen::Index n = inst.x.size();
  if (config.signal->codeword) {
    if (code == nullptr) throw ConfigError("codeword signals need a code");
    inst.x = code_project(*code, inst.x);
  }
  const std::uint64_t op_seed = config.op->seed.value_or(derive_seed(config.seed, "operator", t));
  inst.op = LinearOperator::sample(config.op->kind, resolve_m(*config.op, n), n, config.op->sigma_a, op_seed);
  inst.measurement = add_noise_at_snr(inst.op.apply(inst.x), NoiseSpec{config.snr_db, inst.noise_seed});
  return inst;
}

TrialResult run_trial(const ExperimentConfig& config, const CompressionCode& code, int trial) {
  const Instance inst = make_instance(config, &code, trial);
  const double realized = std::isinf(config.snr_db)
                              ? std::numeric_limits<double>::infinity()
                              : measurement_snr(Vector(inst.measurement.y - inst.measurement.noise),
                                                inst.measurement.noise);
  const CgdResult r = cgd_run(inst.measurement.y, inst.op, code, config.solver, inst.x, realized);
  TrialResult out;
  out.trial = trial;
  out.m = inst.op.rows();
  out.n = inst.op.cols();
  out.psnr_db = r.quality->psnr_db;
  out.mse = r.quality->mse;
  out.normalized_error = r.quality->normalized_error;
  out.ref_err_tilde = *r.trace.records.back().ref_err_tilde;
  out.realized_snr_db = realized;
  out.final_residual = r.trace.records.back().residual;
  out.iterations = r.iterations;
  out.stop_reason = r.trace.stop_reason;
  out.signal_seed = inst.signal_seed;
  out.operator_seed = inst.op.seed();
  out.noise_seed = inst.noise_seed;
  out.trace_csv = r.trace.to_csv();
  return out;
}

std::vector<TrialResult> cmd_run(const ExperimentConfig& config, const RunOptions& options) {
  require_run_fields(config, "run");
  fs::create_directories(options.out_dir);
  // Code length comes from the first instance for file signals.
  Eigen::Index n = signal_length(*config.signal);
  if (n < 0) n = read_signal_file(std::get<FileSignalSpec>(config.signal->source).path).size();
  const auto code = make_code(*config.code, n);

  std::vector<TrialResult> results(static_cast<std::size_t>(config.trials));
  parallel_for(results.size(), options.jobs, [&](std::size_t i) {
    results[i] = run_trial(config, *code, static_cast<int>(i));
    write_text(options.out_dir / trial_name(static_cast<int>(i)), results[i].trace_csv);
  });

  std::vector<double> psnrs, iters, nerrs;
  ojson trials = ojson::array();
  for (const auto& r : results) {
    psnrs.push_back(r.psnr_db);
    iters.push_back(r.iterations);
    nerrs.push_back(r.normalized_error);
    trials.push_back({{"trial", r.trial},
                      {"trace", trial_name(r.trial)},
                      {"m", r.m},
                      {"n", r.n},
                      {"psnr_db", finite_or_string(r.psnr_db)},
                      {"mse", r.mse},
                      {"normalized_error", r.normalized_error},
                      {"normalized_error_tilde", r.ref_err_tilde},
                      {"realized_snr_db", finite_or_string(std::round(r.realized_snr_db * 1e9) / 1e9)},
                      {"final_residual", r.final_residual},
                      {"iterations", r.iterations},
                      {"stop_reason", to_string(r.stop_reason)},
                      {"seeds", {{"signal", r.signal_seed}, {"operator", r.operator_seed}, {"noise", r.noise_seed}}}});
  }
  ojson summary;
  summary["config"] = config_json(config);
  summary["rng"] = SeededRng::algorithm();
  summary["signal_law"] = signal_law(*config.signal);
  summary["code"] = code->name();
  if (auto bits = code->rate_bits()) summary["rate_bits"] = *bits;
  summary["psnr_mean"] = finite_or_string(mean_of(psnrs));
  summary["psnr_std"] = finite_or_string(std_of(psnrs));
  summary["iterations_mean"] = mean_of(iters);
  summary["iterations_std"] = std_of(iters);
  summary["normalized_error_mean"] = mean_of(nerrs);
  summary["trials"] = trials;
  write_text(options.out_dir / "summary.json", summary.dump(2) + "\n");
  if (!options.quiet) {
    std::cerr << "run: " << results.size() << " trials, mean PSNR " << format_double(mean_of(psnrs)) << " dB -> "
              << options.out_dir.string() << "\n";
  }
  return results;
}

void cmd_sweep(const ExperimentConfig& config, const RunOptions& options) {
  require_run_fields(config, "sweep");
  if (!config.sweep || config.sweep->ratios.empty() || config.sweep->snr_db.empty()) {
    throw ConfigError("sweep: config needs a nonempty 'sweep' grid");
  }
  fs::create_directories(options.out_dir);
  std::string csv(kSweepHeader);
  csv += '\n';
  int cell = 0;
  for (double ratio : config.sweep->ratios) {
    for (double snr : config.sweep->snr_db) {
      ExperimentConfig c = config;
      c.op->m.reset();
      c.op->ratio = ratio;
      c.snr_db = snr;
      c.sweep.reset();
      char dir[32];
      std::snprintf(dir, sizeof dir, "cell_%03d", cell++);
      RunOptions o = options;
      o.out_dir = options.out_dir / dir;
      o.quiet = true;
      for (const auto& r : cmd_run(c, o)) {
        csv += format_double(ratio) + ',' + format_double(snr) + ',' + std::to_string(r.trial) + ',' +
               format_double(r.psnr_db) + ',' + std::to_string(r.iterations) + ',' +
               std::string(to_string(r.stop_reason)) + '\n';
      }
    }
  }
  write_text(options.out_dir / "sweep.csv", csv);
  if (!options.quiet) std::cerr << "sweep: " << cell << " cells -> " << (options.out_dir / "sweep.csv").string() << "\n";
}

std::vector<SweepRow> parse_sweep_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line != kSweepHeader) throw ConfigError("sweep csv: wrong header");
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
    if (f.size() != 6) throw ConfigError("sweep csv: expected 6 fields in '" + line + "'");
    rows.push_back({parse_double_field(f[0]), parse_double_field(f[1]), static_cast<int>(parse_double_field(f[2])),
                    parse_double_field(f[3]), static_cast<int>(parse_double_field(f[4])), parse_stop_reason(f[5])});
  }
  return rows;
}

ProjectReport cmd_project(const ExperimentConfig& config, const fs::path& input, const RunOptions& options) {
  if (!config.code) throw ConfigError("project: config needs a 'code' section");
  const Vector x = read_signal_file(input);
  const auto code = make_code(*config.code, x.size());
  const BitStream bits = code->encode(x);
  const Vector p = code->decode(bits);
  ProjectReport rep;
  rep.bits = bits.size_bits();
  rep.distortion = (x - p).norm();
  if (const double d = code->distortion_bound(); std::isfinite(d)) rep.bound = d;
  rep.idempotent = code->project(p) == p;

  fs::create_directories(options.out_dir);
  io::write_f64v(options.out_dir / "projected.f64v", p);
  ojson j;
  j["input"] = input.string();
  j["code"] = code_to_json(*config.code);
  j["n"] = x.size();
  j["bits"] = rep.bits;
  j["distortion"] = rep.distortion;
  if (rep.bound) {
    j["distortion_bound"] = *rep.bound;
    j["within_bound"] = rep.distortion <= *rep.bound;
  }
  j["idempotent"] = rep.idempotent;
  write_text(options.out_dir / "project.json", j.dump(2) + "\n");
  if (!options.quiet) std::cout << j.dump(2) << "\n";
  return rep;
}

std::vector<CspRow> cmd_csp(const ExperimentConfig& config, const RunOptions& options) {
  require_run_fields(config, "csp");
  Eigen::Index n = signal_length(*config.signal);
  if (n < 0) n = read_signal_file(std::get<FileSignalSpec>(config.signal->source).path).size();
  const auto code = make_code(*config.code, n);
  const auto* fixed = dynamic_cast<const FixedLayoutCode*>(code.get());
  if (fixed == nullptr) throw ConfigError("csp: the code must have an enumerable codebook");
  const auto book = enumerate_codebook(*fixed);

  std::vector<CspRow> rows(static_cast<std::size_t>(config.trials));
  parallel_for(rows.size(), options.jobs, [&](std::size_t i) {
    const Instance inst = make_instance(config, code.get(), static_cast<int>(i));
    const auto csp = csp_exhaustive(inst.measurement.y, inst.op, book);
    const auto run = cgd_run(inst.measurement.y, inst.op, *code, config.solver);
    rows[i] = {static_cast<int>(i), csp.residual, run.trace.records.back().residual};
  });
  fs::create_directories(options.out_dir);
  std::string csv = "trial,csp_residual,cgd_residual\n";
  int dominated = 0;
  for (const auto& r : rows) {
    csv += std::to_string(r.trial) + ',' + format_double(r.csp_residual) + ',' + format_double(r.cgd_residual) + '\n';
    if (r.csp_residual <= r.cgd_residual) ++dominated;
  }
  write_text(options.out_dir / "csp.csv", csv);
  ojson summary;
  summary["config"] = config_json(config);
  summary["rng"] = SeededRng::algorithm();
  summary["codebook_size"] = book.size();
  summary["trials"] = rows.size();
  summary["csp_dominates"] = dominated;
  write_text(options.out_dir / "summary.json", summary.dump(2) + "\n");
  if (!options.quiet) std::cerr << "csp: CSP residual <= C-GD residual in " << dominated << "/" << rows.size() << "\n";
  return rows;
}

}  // namespace cgd::cli
