// =============================================================================
// yule.hpp — marked Yule-forest approximation of the ancestry at the
// selected site.
//
// The genealogy of the beneficial allele during the sweep is approximated by
// a Yule process with immigration, grown as Hoppe's urn: at the transition
// from level i to i+1 an existing line splits with probability i/(theta+i)
// (a uniformly chosen line gains a child) or a new immigrant line appears
// with probability theta/(theta+i) (a new mutational origin).  Growth stops
// at floor(2*alpha) lines.
//
// A sample of n leaves is drawn at the final level, its induced subtree is
// extracted, and every subtree branch spanning levels (i1, i2] is marked
// independently with probability
//
//   1 - p(i1, i2),   p(i1, i2) = exp( -(gamma/ln alpha) * sum_{i=i1+1}^{i2} 1/(i+theta) )
//
// (a mark = at least one recombination event on that stretch of the sweep).
// Two partitions result:
//
//   partition_tilde (same immigrant tree)                 — Ewens-distributed
//   partition       (same tree and no separating mark)    — the object whose
//                                                           pair probabilities
//                                                           predict H_T/H_T0
// =============================================================================
#pragma once

#include <iosfwd>
#include <random>
#include <vector>

#include "sweepsim/params.hpp"

namespace sweepsim {

inline constexpr int kImmigrantRoot = -1;

struct YuleBranch {
  int start_level = 1;        // level at which the line appears
  int end_level = 1;          // lines persist to the final level
  int parent = kImmigrantRoot;  // branch id, or kImmigrantRoot
  int tree_id = 0;            // which immigrant founded this line's tree
};

struct YuleForest {
  std::vector<YuleBranch> branches;  // branch id = index; one born per level
  int final_level = 1;

  int tree_count() const;
  /// Throws std::logic_error on structural violations (level counts, parent
  /// liveness, tree consistency).
  void check_invariants() const;
  /// One line per branch: "id parent i1 i2 tree" (debug / visual inspection).
  void write_text(std::ostream& out) const;
};

enum class StoppingRule {
  kDeterministic,  // stop at exactly floor(2*alpha) lines (the default)
  kPoisson,        // stop at Poisson(2*alpha) lines (conditioned >= 1)
};

YuleForest grow_forest(double alpha, double theta, std::mt19937_64& rng,
                       StoppingRule rule = StoppingRule::kDeterministic);

/// Precomputed level sums for the marking probabilities, reusable across many
/// sample_and_mark calls with the same (final_level, gamma, theta, alpha).
class MarkingModel {
 public:
  MarkingModel(int final_level, double gamma, double theta, double alpha);
  /// p(i1, i2) above; requires 1 <= i1 <= i2 <= final_level.
  double p_between(int i1, int i2) const;
  double mark_prob(int i1, int i2) const { return 1.0 - p_between(i1, i2); }

 private:
  double coeff_;                 // gamma / ln(alpha)
  std::vector<double> prefix_;   // prefix_[i] = sum_{j=1}^{i} 1/(j+theta)
};

struct MarkedSegment {
  int lower_level = 1;  // i1: level of the rootward vertex
  int upper_level = 1;  // i2: level of the leafward vertex
  bool marked = false;
};

struct MarkedSample {
  std::vector<int> leaves;              // sampled branch ids, size n
  std::vector<MarkedSegment> segments;  // induced-subtree branches
  std::vector<std::vector<int>> partition_tilde;  // blocks of {0..n-1}
  std::vector<std::vector<int>> partition;

  /// Throws std::logic_error unless partition refines partition_tilde and
  /// both partition {0..n-1}.
  void check_invariants() const;
};

MarkedSample sample_and_mark(const YuleForest& forest, int n,
                             const MarkingModel& marking, std::mt19937_64& rng);
MarkedSample sample_and_mark(const YuleForest& forest, int n, double gamma,
                             double theta, double alpha, std::mt19937_64& rng);

/// Kingman continuation on the blocks of partition (per-pair rate 1):
/// partitions[j] is the state after j merges, times[j] the elapsed time.
struct ComposedGenealogy {
  std::vector<double> times;
  std::vector<std::vector<std::vector<int>>> partitions;
};
ComposedGenealogy compose_with_kingman(const MarkedSample& sample,
                                       std::mt19937_64& rng);

/// Monte Carlo estimate of P[Upsilon = {{1,2}}] (two sampled lines identical
/// by descent through the sweep): repeated grow_forest + sample_and_mark.
struct PairIdentityEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long draws = 0;
};
PairIdentityEstimate pair_identity_prob_mc(const SweepParams& params, long draws,
                                           int workers = 1,
                                           std::uint64_t cell_index = 0);

}  // namespace sweepsim
