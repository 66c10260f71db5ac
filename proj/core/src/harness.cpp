#include "sweepsim/harness.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "sweepsim/analytics.hpp"
#include "sweepsim/parallel.hpp"
#include "sweepsim/rng.hpp"
#include "sweepsim/yule.hpp"

namespace sweepsim {
namespace {

const char* convention_name(GammaConvention c) {
  switch (c) {
    case GammaConvention::kLogAlpha: return "log-alpha";
    case GammaConvention::kSweepDuration: return "sweep-duration";
    case GammaConvention::kCalibrated: return "calibrated";
  }
  return "?";
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string grid_to_string(const std::optional<std::vector<double>>& grid) {
  if (!grid) return "(unset)";
  std::string s;
  for (double v : *grid) {
    if (!s.empty()) s += ' ';
    s += format_double(v);
  }
  return s;
}

std::vector<std::string> config_comments(const ExperimentConfig& cfg) {
  const auto& p = cfg.params;
  std::vector<std::string> c;
  c.push_back(std::string("mode=") + experiment_mode_name(cfg.mode));
  c.push_back("alpha=" + format_double(p.alpha) + " theta=" +
              format_double(p.theta) + " rho=" + format_double(p.rho) +
              " gamma=" + format_double(p.gamma));
  c.push_back("pop_size=" + std::to_string(p.pop_size) + " sample_size=" +
              std::to_string(p.sample_size) + " seed=" + std::to_string(p.seed));
  c.push_back("replicates=" + std::to_string(cfg.replicates) + " workers=" +
              std::to_string(cfg.workers) + " convention=" +
              convention_name(cfg.convention));
  c.push_back("theta_grid=" + grid_to_string(cfg.theta_grid) + " rho_grid=" +
              grid_to_string(cfg.rho_grid));
  return c;
}

std::vector<double> grid_or_single(const std::optional<std::vector<double>>& grid,
                                   double single) {
  return grid ? *grid : std::vector<double>{single};
}

struct MeanSe {
  double mean = 0.0, se = 0.0, var = 0.0;
};
MeanSe mean_se(const std::vector<double>& xs) {
  MeanSe r;
  const std::size_t n = xs.size();
  if (n == 0) return r;
  double sum = 0.0;
  for (double x : xs) sum += x;
  r.mean = sum / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - r.mean) * (x - r.mean);
  r.var = n > 1 ? ss / (n - 1) : 0.0;
  r.se = std::sqrt(r.var / n);
  return r;
}

ExperimentResult run_het_compare(const ExperimentConfig& cfg) {
  ExperimentResult res;
  res.table.columns = {"theta",  "rho",  "wf_mean",     "wf_se",
                       "series", "star", "n_replicates"};
  const auto thetas = grid_or_single(cfg.theta_grid, cfg.params.theta);
  const auto rhos = grid_or_single(cfg.rho_grid, cfg.params.rho);
  std::uint64_t cell = 0;
  for (double theta : thetas) {
    for (double rho : rhos) {
      SweepParams p = cfg.params;
      p.theta = theta;
      p.rho = rho;
      p.gamma = gamma_from_rho(p.alpha, rho, cfg.convention);
      p.sample_size = 2;
      p.validate();
      HetRatioEstimate est =
          estimate_het_ratio(p, cfg.replicates, cfg.workers, cell);
      res.total_replicates += cfg.replicates;
      res.failed_replicates += est.failures;
      res.table.rows.push_back({theta, rho, est.mean, est.std_error,
                                het_ratio_yule(p.alpha, theta, p.gamma).value,
                                het_ratio_star(theta, p.gamma),
                                static_cast<double>(est.replicates)});
      ++cell;
    }
  }
  return res;
}

ExperimentResult run_fixation_times(const ExperimentConfig& cfg) {
  ExperimentResult res;
  res.table.columns = {"theta",     "mean_T", "se_T",       "mean_Tstar",
                       "se_Tstar",  "var_Tstar", "pred_T",  "pred_Tstar",
                       "n_replicates"};
  const auto thetas = grid_or_single(cfg.theta_grid, cfg.params.theta);
  std::uint64_t cell = 0;
  for (double theta : thetas) {
    SweepParams p = cfg.params;
    p.theta = theta;
    p.validate();
    std::vector<double> T(cfg.replicates, std::nan("")),
        Tstar(cfg.replicates, std::nan(""));
    parallel_for_indexed(cfg.replicates, cfg.workers, [&](std::int64_t rep) {
      auto rng = make_stream(p.seed, cell, static_cast<std::uint64_t>(rep));
      try {
        FrequencyPath path = simulate_wf_path(p, rng);
        PathDecomposition d = decompose_path(path);
        T[rep] = d.t_fix;
        Tstar[rep] = d.t_star;
      } catch (const PathBudgetExceeded&) {
      }
    });
    std::vector<double> okT, okTstar;
    for (long i = 0; i < cfg.replicates; ++i) {
      if (!std::isnan(T[i])) {
        okT.push_back(T[i]);
        okTstar.push_back(Tstar[i]);
      }
    }
    res.total_replicates += cfg.replicates;
    res.failed_replicates += cfg.replicates - static_cast<long>(okT.size());
    MeanSe mT = mean_se(okT), mTs = mean_se(okTstar);
    const double pred_T =
        theta > 0.0 ? expected_T(p.alpha, theta) : std::nan("");
    res.table.rows.push_back({theta, mT.mean, mT.se, mTs.mean, mTs.se, mTs.var,
                              pred_T, expected_Tstar(p.alpha),
                              static_cast<double>(okT.size())});
    ++cell;
  }
  return res;
}

ExperimentResult run_yule_vs_coalescent(const ExperimentConfig& cfg) {
  ExperimentResult res;
  const SweepParams& p = cfg.params;
  const int n = p.sample_size;

  std::vector<long> wf_counts(n, 0), yule_counts(n, 0);
  std::vector<signed char> wf_k(cfg.replicates, -1), yule_k(cfg.replicates, -1);

  parallel_for_indexed(cfg.replicates, cfg.workers, [&](std::int64_t rep) {
    auto rng = make_stream(p.seed, 0, static_cast<std::uint64_t>(rep));
    try {
      FrequencyPath path = simulate_wf_path(p, rng);
      BackwardResult bw = run_backward(path, p, RatesMode::kFull, rng);
      wf_k[rep] = static_cast<signed char>(bw.state.block_count());
    } catch (const PathBudgetExceeded&) {
    }
  });
  const MarkingModel marking(static_cast<int>(std::floor(2.0 * p.alpha)),
                             p.gamma, p.theta, p.alpha);
  parallel_for_indexed(cfg.replicates, cfg.workers, [&](std::int64_t rep) {
    auto rng = make_stream(p.seed, 1, static_cast<std::uint64_t>(rep));
    YuleForest forest = grow_forest(p.alpha, p.theta, rng);
    MarkedSample sample = sample_and_mark(forest, n, marking, rng);
    yule_k[rep] = static_cast<signed char>(sample.partition.size());
  });

  long wf_fail = 0;
  for (long i = 0; i < cfg.replicates; ++i) {
    if (wf_k[i] < 0) {
      ++wf_fail;
    } else {
      ++wf_counts[wf_k[i] - 1];
    }
    ++yule_counts[yule_k[i] - 1];
  }
  res.total_replicates = 2 * cfg.replicates;
  res.failed_replicates = wf_fail;

  res.table.columns = {"ancestors", "coalescent_count", "yule_count"};
  for (int k = 1; k <= n; ++k) {
    res.table.rows.push_back({static_cast<double>(k),
                              static_cast<double>(wf_counts[k - 1]),
                              static_cast<double>(yule_counts[k - 1])});
  }
  ChiSquareScore score = two_sample_chi_square(wf_counts, yule_counts);
  res.table.comments.push_back(
      "chi_square=" + format_double(score.statistic) + " df=" +
      std::to_string(score.df) + " critical_1pct=" +
      format_double(score.critical_1pct));
  return res;
}

ExperimentResult run_green_check(const ExperimentConfig& cfg) {
  ExperimentResult res;
  const SweepParams& p = cfg.params;
  GreenFnContext ctx{p.alpha, p.theta};

  const double et_quad =
      p.theta > 0.0 ? expected_T_quadrature(ctx) : std::nan("");
  const double et_series =
      p.theta > 0.0 ? expected_T(p.alpha, p.theta) : std::nan("");
  const double ets_quad = expected_Tstar_quadrature(ctx);
  const double ets_series = expected_Tstar(p.alpha);

  double max_abs_err = 0.0;
  if (p.theta < 1.0) {
    GreenFnContext ctx0 = ctx;
    ctx0.theta = 0.0;
    for (int i = 1; i <= 100; ++i) {
      const double x = i / 101.0;
      const double closed = std::expm1(-2.0 * p.alpha * x) /
                            std::expm1(-2.0 * p.alpha);
      max_abs_err =
          std::max(max_abs_err, std::abs(fixation_prob(x, ctx0) - closed));
    }
  }

  res.table.columns = {"alpha",        "theta",     "et_series",
                       "et_quad",      "et_rel_diff", "etstar_series",
                       "etstar_quad",  "etstar_rel_diff",
                       "fixp_max_abs_err"};
  res.table.rows.push_back(
      {p.alpha, p.theta, et_series, et_quad,
       p.theta > 0.0 ? et_quad / et_series - 1.0 : std::nan(""), ets_series,
       ets_quad, ets_quad / ets_series - 1.0, max_abs_err});
  return res;
}

}  // namespace

const char* experiment_mode_name(ExperimentMode mode) {
  switch (mode) {
    case ExperimentMode::kHetCompare: return "het-compare";
    case ExperimentMode::kFixationTimes: return "fixation-times";
    case ExperimentMode::kYuleVsCoalescent: return "yule-vs-coalescent";
    case ExperimentMode::kGreenCheck: return "green-check";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  params.validate();
  if (replicates < 1) throw ConfigError("replicates must be >= 1");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (theta_grid && theta_grid->empty())
    throw ConfigError("theta grid must be non-empty when given");
  if (rho_grid && rho_grid->empty())
    throw ConfigError("rho grid must be non-empty when given");
  for (double t : grid_or_single(theta_grid, params.theta)) {
    if (!(t >= 0.0)) throw ConfigError("theta grid values must be >= 0");
  }
  for (double r : grid_or_single(rho_grid, params.rho)) {
    if (!(r >= 0.0)) throw ConfigError("rho grid values must be >= 0");
  }
}

ReplicateSummary run_replicate(const SweepParams& params, std::uint64_t cell,
                               std::uint64_t replicate) {
  auto rng = make_stream(params.seed, cell, replicate);
  FrequencyPath path = simulate_wf_path(params, rng);
  BackwardResult bw = run_backward(path, params, RatesMode::kFull, rng);
  PathDecomposition d = decompose_path(path);
  ReplicateSummary s;
  s.replicate_index = static_cast<long>(replicate);
  s.pair_distinct = bw.state.block_count() == params.sample_size;
  s.T = d.t_fix;
  s.T0 = d.t0;
  s.Tstar = d.t_star;
  s.event_counts = bw.log.counts();
  return s;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentResult res;
  switch (config.mode) {
    case ExperimentMode::kHetCompare:
      res = run_het_compare(config);
      break;
    case ExperimentMode::kFixationTimes:
      res = run_fixation_times(config);
      break;
    case ExperimentMode::kYuleVsCoalescent:
      res = run_yule_vs_coalescent(config);
      break;
    case ExperimentMode::kGreenCheck:
      res = run_green_check(config);
      break;
  }
  auto comments = config_comments(config);
  comments.insert(comments.end(), res.table.comments.begin(),
                  res.table.comments.end());
  res.table.comments = std::move(comments);
  if (res.failed_replicates > 0) {
    res.table.comments.push_back(
        "failed_replicates=" + std::to_string(res.failed_replicates) + "/" +
        std::to_string(res.total_replicates));
  }
  return res;
}

std::string to_csv(const ResultTable& table) {
  std::ostringstream out;
  for (const auto& c : table.comments) out << "# " << c << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out << ',';
    out << table.columns[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << format_double(row[i]);
    }
    out << '\n';
  }
  return out.str();
}

std::string to_json_string(const ResultTable& table) {
  nlohmann::json j;
  j["comments"] = table.comments;
  j["columns"] = table.columns;
  j["rows"] = table.rows;
  return j.dump(2) + "\n";
}

void emit(const ResultTable& table, OutputFormat format,
          const std::string& path) {
  if (table.rows.empty()) throw ConfigError("emit: table is empty");
  const std::string payload =
      format == OutputFormat::kCsv ? to_csv(table) : to_json_string(table);
  if (path.empty() || path == "-") {
    std::cout << payload;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit: cannot open " + path);
  out << payload;
  if (!out.good()) throw std::runtime_error("emit: write failed for " + path);
}

ChiSquareScore two_sample_chi_square(const std::vector<long>& a,
                                     const std::vector<long>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("two_sample_chi_square: size mismatch");
  double ta = 0.0, tb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ta += a[i];
    tb += b[i];
  }
  if (ta <= 0.0 || tb <= 0.0)
    throw std::invalid_argument("two_sample_chi_square: empty sample");
  ChiSquareScore score;
  const double ka = std::sqrt(tb / ta), kb = std::sqrt(ta / tb);
  int bins = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double total = static_cast<double>(a[i] + b[i]);
    if (total == 0.0) continue;
    ++bins;
    const double d = ka * a[i] - kb * b[i];
    score.statistic += d * d / total;
  }
  score.df = bins - 1;
  // Upper 1% points of chi-square, df = 1..10.
  static constexpr double kCritical[] = {6.635,  9.210,  11.345, 13.277, 15.086,
                                         16.812, 18.475, 20.090, 21.666, 23.209};
  score.critical_1pct =
      (score.df >= 1 && score.df <= 10) ? kCritical[score.df - 1] : std::nan("");
  return score;
}

}  // namespace sweepsim
