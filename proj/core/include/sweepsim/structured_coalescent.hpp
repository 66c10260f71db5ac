// =============================================================================
// structured_coalescent.hpp — two-background ancestral process along a path.
//
// Given a fixation trajectory X of the beneficial allele, the genealogy of a
// sample taken at the fixation time T is run backward in time beta = T - t.
// Each ancestral lineage lives either in the beneficial background (B) or the
// wild-type background (b); with X = X_{T-beta} the instantaneous rates are
//
//   coalescence within B   per pair   1 / X
//   coalescence within b   per pair   1 / (1 - X)
//   mutation  B -> b       per line   (theta/2) (1 - X) / X
//   recombination B -> b   per line   rho (1 - X)
//   recombination b -> B   per line   rho X
//
// The process stops at beta0 = T - T0 (the establishment time), where every
// lineage has left B through its founding mutation.
//
// Two engines implement this:
//
//  * Wright-Fisher paths (full rates): an exact per-generation backward pass.
//    Each lineage picks its parent in the previous generation from the
//    discrete model's transition law; coalescence is parent collision.  This
//    handles the 1/X blow-up near beta0 exactly (when the beneficial copy
//    count is k, a B lineage picks one of the k copies, or its founding
//    mutation when the count hits 0).
//  * Diffusion paths, and the simplified-rates mode: Gillespie simulation
//    with the rates held constant within each stored grid cell.
//
// The simplified mode replaces the full rates by the reduced set used by the
// approximation chain (coalescence in B at per-pair rate (1-X)/X, mutation as
// above, recombination B -> b at rate rho(1-X); no coalescence in b and no
// recombination back into B).
// =============================================================================
#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

#include "sweepsim/frequency_path.hpp"
#include "sweepsim/params.hpp"

namespace sweepsim {

enum class EventKind : int {
  kCoalB = 0,       // coalescence of two B lineages
  kCoalWild = 1,    // coalescence of two b lineages
  kMutToWild = 2,   // B lineage leaves via its founding mutation
  kRecToWild = 3,   // B lineage recombines onto a wild-type background
  kRecToB = 4,      // b lineage recombines onto the beneficial background
};
inline constexpr int kEventKindCount = 5;
const char* event_kind_name(EventKind kind);

struct CoalescentEvent {
  double beta = 0.0;
  EventKind kind = EventKind::kCoalB;
  // Block ids (indices into the union of blocks at the time of the event;
  // for coalescences the two merged blocks, otherwise the moved block).
  std::vector<int> participants;
};

struct EventLog {
  std::vector<CoalescentEvent> events;
  std::array<long, kEventKindCount> counts() const;
  void write_csv(std::ostream& out) const;
};

struct CoalescentState {
  std::vector<std::vector<int>> blocks_B;  // blocks still linked to B
  std::vector<std::vector<int>> blocks_b;  // blocks on the wild-type side
  double beta = 0.0;

  int block_count() const {
    return static_cast<int>(blocks_B.size() + blocks_b.size());
  }
  /// Throws std::logic_error unless blocks_B + blocks_b partition {0..n-1}.
  void check_partition(int n) const;
};

enum class RatesMode { kFull, kSimplified };

struct BackwardResult {
  CoalescentState state;  // at beta0 = T - T0
  EventLog log;
};

/// Runs the sample (params.sample_size singletons, all starting in B at
/// beta = 0) backward along the path to beta0.  Partition validity is
/// asserted after every event.
BackwardResult run_backward(const FrequencyPath& path, const SweepParams& params,
                            RatesMode mode, std::mt19937_64& rng);

/// Plain Kingman continuation for beta > beta0 (per-pair rate 1), used when
/// observables need the pre-establishment history.  Requires blocks_B empty.
struct KingmanTail {
  std::vector<double> waiting_times;            // between successive merges
  std::vector<std::pair<int, int>> merges;      // merged block indices
};
KingmanTail kingman_tail(const CoalescentState& state, std::mt19937_64& rng);

/// Monte Carlo estimate of the heterozygosity ratio H_T / H_T0: the fraction
/// of replicates in which a sample of two lines has two distinct ancestors at
/// beta0.  Fresh WF path per replicate; per-replicate streams derived from
/// (params.seed, cell_index, replicate).
struct HetRatioEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long replicates = 0;  // successful replicates
  long failures = 0;
};
HetRatioEstimate estimate_het_ratio(const SweepParams& params, long replicates,
                                    int workers = 1, std::uint64_t cell_index = 0);

}  // namespace sweepsim
