#include <CLI11.hpp>
#include <iostream>
#include <map>

#include "cgd/theory.hpp"
#include "experiment.hpp"

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kCodec = 3, kDimension = 4 };

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  unsigned jobs = 1;
  bool quiet = false;
};

void add_common(CLI::App* app, Common& c, bool needs_config = true) {
  auto* opt = app->add_option("--config", c.config, "experiment config (JSON)");
  if (needs_config) opt->required();
  app->add_option("--seed", c.seed, "master seed, overrides the config");
  app->add_option("--out", c.out, "output directory");
  app->add_option("--jobs", c.jobs, "worker threads (0 = all cores)");
  app->add_flag("--quiet", c.quiet, "no progress output");
}

cgd::cli::ExperimentConfig load(const Common& c) {
  auto cfg = cgd::cli::load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  return cfg;
}

cgd::cli::RunOptions options(const Common& c, const cgd::cli::ExperimentConfig& cfg, const char* fallback) {
  cgd::cli::RunOptions o;
  o.out_dir = !c.out.empty() ? std::filesystem::path(c.out) : cfg.output.value_or(fallback);
  o.jobs = c.jobs;
  o.quiet = c.quiet;
  return o;
}

int run_theory(const std::vector<std::string>& args, const Common& c) {
  if (args.empty()) throw cgd::ConfigError("theory-check: missing check name");
  std::map<std::string, double> params;
  std::int64_t trials = 1000;
  std::uint64_t seed = c.seed.value_or(0);
  for (std::size_t i = 1; i < args.size(); ++i) {
    const auto eq = args[i].find('=');
    if (eq == std::string::npos) throw cgd::ConfigError("theory-check: expected key=value, got '" + args[i] + "'");
    const std::string key = args[i].substr(0, eq);
    const std::string value = args[i].substr(eq + 1);
    if (key == "trials") {
      trials = static_cast<std::int64_t>(cgd::cli::parse_double_field(value));
    } else if (key == "seed") {
      seed = std::stoull(value);
    } else {
      params[key] = cgd::cli::parse_double_field(value);
    }
  }
  const auto report = cgd::tail_check(args[0], params, trials, seed, c.jobs);
  std::cout << report.to_json() << "\n";
  return report.pass ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compression-based gradient descent for compressed sensing"};
  app.require_subcommand(1);

  Common run_c, sweep_c, project_c, csp_c, theory_c;
  std::string input;
  std::vector<std::string> theory_args;

  auto* run = app.add_subcommand("run", "run C-GD trials and write traces plus a summary");
  add_common(run, run_c);
  auto* sweep = app.add_subcommand("sweep", "run a grid over sampling ratio and SNR");
  add_common(sweep, sweep_c);
  auto* project = app.add_subcommand("project", "project a signal file onto a code's codebook");
  add_common(project, project_c);
  project->add_option("--input", input, "signal file (.f64v or .pgm)")->required();
  auto* csp = app.add_subcommand("csp", "compare exhaustive CSP against C-GD");
  add_common(csp, csp_c);
  auto* theory = app.add_subcommand("theory-check", "Monte-Carlo check of a concentration bound");
  add_common(theory, theory_c, false);
  theory->add_option("check", theory_args, "check name followed by key=value parameters")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*run) {
      const auto cfg = load(run_c);
      cgd::cli::cmd_run(cfg, options(run_c, cfg, "cgd_run"));
    } else if (*sweep) {
      const auto cfg = load(sweep_c);
      cgd::cli::cmd_sweep(cfg, options(sweep_c, cfg, "cgd_sweep"));
    } else if (*project) {
      const auto cfg = load(project_c);
      const auto rep = cgd::cli::cmd_project(cfg, input, options(project_c, cfg, "cgd_project"));
      if (rep.bound && rep.distortion > *rep.bound) return kFailure;
    } else if (*csp) {
      const auto cfg = load(csp_c);
      cgd::cli::cmd_csp(cfg, options(csp_c, cfg, "cgd_csp"));
    } else if (*theory) {
      return run_theory(theory_args, theory_c);
    }
  } catch (const cgd::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const cgd::CodecError& e) {
    std::cerr << "codec error: " << e.what() << "\n";
    return kCodec;
  } catch (const cgd::DimensionError& e) {
    std::cerr << "dimension error: " << e.what() << "\n";
    return kDimension;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kOk;
}
