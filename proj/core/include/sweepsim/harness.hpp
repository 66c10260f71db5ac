// =============================================================================
// harness.hpp — experiment orchestration and output emission.
//
// Four experiment modes tie the modules together:
//
//   het-compare         WF structured-coalescent heterozygosity ratio across a
//                       (theta, rho) grid, side by side with the Yule-series
//                       and star-like formulas
//   fixation-times      simulated T / T0 / T* moments vs. the closed forms
//   yule-vs-coalescent  distribution of the number of distinct ancestors at
//                       establishment: exact structured coalescent vs. the
//                       Yule-forest approximation, with a chi-square score
//   green-check         quadrature oracles vs. series formulas
//
// Determinism: every replicate draws from a stream keyed by (seed, cell,
// replicate), so output bytes are identical for any worker count.
// =============================================================================
#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "sweepsim/params.hpp"
#include "sweepsim/structured_coalescent.hpp"

namespace sweepsim {

enum class ExperimentMode {
  kHetCompare,
  kFixationTimes,
  kYuleVsCoalescent,
  kGreenCheck,
};
const char* experiment_mode_name(ExperimentMode mode);

enum class OutputFormat { kCsv, kJson };

struct ExperimentConfig {
  ExperimentMode mode = ExperimentMode::kHetCompare;
  SweepParams params;
  GammaConvention convention = GammaConvention::kCalibrated;
  long replicates = 1000;
  // When absent, the corresponding single value from `params` is used.
  std::optional<std::vector<double>> theta_grid;
  std::optional<std::vector<double>> rho_grid;
  std::string output_path;  // empty = stdout
  OutputFormat format = OutputFormat::kCsv;
  int workers = 1;

  void validate() const;
};

/// Per-replicate observables (n = 2 runs fill pair_distinct).
struct ReplicateSummary {
  long replicate_index = 0;
  bool pair_distinct = false;
  double T = 0.0;
  double T0 = 0.0;
  double Tstar = 0.0;
  std::array<long, kEventKindCount> event_counts{};
};

/// One WF path + backward pass with the replicate's own stream.
ReplicateSummary run_replicate(const SweepParams& params, std::uint64_t cell,
                               std::uint64_t replicate);

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  // Audit trail (config, seed, derived statistics); emitted as comments.
  std::vector<std::string> comments;
};

struct ExperimentResult {
  ResultTable table;
  long total_replicates = 0;
  long failed_replicates = 0;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

std::string to_csv(const ResultTable& table);
std::string to_json_string(const ResultTable& table);
/// Writes the table to `path` ("" or "-" = stdout); bit-identical re-emission
/// for identical inputs.
void emit(const ResultTable& table, OutputFormat format, const std::string& path);

/// Two-sample chi-square over matched count vectors (bins with zero total are
/// dropped; df = populated bins - 1).
struct ChiSquareScore {
  double statistic = 0.0;
  int df = 0;
  double critical_1pct = 0.0;
};
ChiSquareScore two_sample_chi_square(const std::vector<long>& a,
                                     const std::vector<long>& b);

}  // namespace sweepsim
