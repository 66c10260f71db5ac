// Command-line experiment runner.
//
//   sweepsim <het-compare|fixation-times|yule-vs-coalescent|green-check>
//            [--alpha A] [--theta T | --theta-grid T1 T2 ...]
//            [--rho R | --rho-grid R1 R2 ...] [--gamma G]
//            [--pop-size N] [--sample-size n] [--replicates M] [--seed S]
//            [--workers W] [--output FILE] [--format csv|json]
//            [--convention log-alpha|sweep-duration|calibrated]
//            [--config FILE]
//
// Exit codes: 0 success, 1 configuration error, 2 more than 1% of replicates
// failed.

#include <cstdio>
#include <exception>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sweepsim/harness.hpp"

namespace {

struct CliOptions {
  double alpha = 1000.0;
  double theta = 0.0;
  std::optional<double> rho;
  std::optional<double> gamma;
  std::vector<double> theta_grid;
  std::vector<double> rho_grid;
  int pop_size = 10'000;
  int sample_size = 2;
  long replicates = 1000;
  std::uint64_t seed = 42;
  int workers = 1;
  std::string output;
  std::string format = "csv";
  std::string convention = "calibrated";
};

sweepsim::ExperimentConfig build_config(const CliOptions& o,
                                        sweepsim::ExperimentMode mode) {
  using namespace sweepsim;
  if (o.rho && o.gamma) {
    throw ConfigError("give either --rho or --gamma, not both");
  }
  static const std::map<std::string, GammaConvention> conventions = {
      {"log-alpha", GammaConvention::kLogAlpha},
      {"sweep-duration", GammaConvention::kSweepDuration},
      {"calibrated", GammaConvention::kCalibrated},
  };
  auto conv_it = conventions.find(o.convention);
  if (conv_it == conventions.end()) {
    throw ConfigError("unknown convention: " + o.convention);
  }

  ExperimentConfig cfg;
  cfg.mode = mode;
  cfg.convention = conv_it->second;
  if (o.gamma) {
    cfg.params = SweepParams::with_gamma(o.alpha, o.theta, *o.gamma, o.pop_size,
                                         o.sample_size, o.seed, cfg.convention);
  } else {
    cfg.params = SweepParams::with_rho(o.alpha, o.theta, o.rho.value_or(0.0),
                                       o.pop_size, o.sample_size, o.seed,
                                       cfg.convention);
  }
  cfg.replicates = o.replicates;
  cfg.workers = o.workers;
  cfg.output_path = o.output;
  if (o.format == "csv") {
    cfg.format = OutputFormat::kCsv;
  } else if (o.format == "json") {
    cfg.format = OutputFormat::kJson;
  } else {
    throw ConfigError("unknown format: " + o.format);
  }
  if (!o.theta_grid.empty()) cfg.theta_grid = o.theta_grid;
  if (!o.rho_grid.empty()) cfg.rho_grid = o.rho_grid;
  // het-compare mirrors the reference comparison grid unless overridden.
  if (mode == ExperimentMode::kHetCompare) {
    if (!cfg.theta_grid) cfg.theta_grid = std::vector<double>{0.0, 0.1, 1.0};
    if (!cfg.rho_grid) cfg.rho_grid = std::vector<double>{2.0, 5.0, 10.0, 50.0};
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo and analytic toolkit for genetic hitchhiking "
               "under recurrent beneficial mutation"};
  app.require_subcommand(1);
  app.set_config("--config");

  CliOptions opt;
  sweepsim::ExperimentMode mode = sweepsim::ExperimentMode::kHetCompare;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--alpha", opt.alpha, "selection intensity N*s");
    sub->add_option("--theta", opt.theta, "scaled mutation rate 2*N*u");
    sub->add_option("--rho", opt.rho, "scaled recombination rate");
    sub->add_option("--gamma", opt.gamma, "recombination scale (alternative to --rho)");
    sub->add_option("--theta-grid", opt.theta_grid, "theta sweep values");
    sub->add_option("--rho-grid", opt.rho_grid, "rho sweep values");
    sub->add_option("--pop-size", opt.pop_size, "Wright-Fisher population size N");
    sub->add_option("--sample-size", opt.sample_size, "sample size n");
    sub->add_option("--replicates", opt.replicates, "Monte Carlo replicates");
    sub->add_option("--seed", opt.seed, "master RNG seed");
    sub->add_option("--workers", opt.workers, "parallel worker threads");
    sub->add_option("--output", opt.output, "output path (default stdout)");
    sub->add_option("--format", opt.format, "csv or json");
    sub->add_option("--convention", opt.convention,
                    "rho<->gamma convention: log-alpha, sweep-duration, calibrated");
  };

  using sweepsim::ExperimentMode;
  const std::pair<const char*, ExperimentMode> modes[] = {
      {"het-compare", ExperimentMode::kHetCompare},
      {"fixation-times", ExperimentMode::kFixationTimes},
      {"yule-vs-coalescent", ExperimentMode::kYuleVsCoalescent},
      {"green-check", ExperimentMode::kGreenCheck},
  };
  for (const auto& [name, m] : modes) {
    CLI::App* sub = app.add_subcommand(name);
    add_common(sub);
    sub->callback([&mode, m] { mode = m; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    sweepsim::ExperimentConfig cfg = build_config(opt, mode);
    sweepsim::ExperimentResult result = sweepsim::run_experiment(cfg);
    sweepsim::emit(result.table, cfg.format, cfg.output_path);
    if (result.failed_replicates * 100 > result.total_replicates) {
      std::fprintf(stderr, "error: %ld of %ld replicates failed\n",
                   result.failed_replicates, result.total_replicates);
      return 2;
    }
    return 0;
  } catch (const sweepsim::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
