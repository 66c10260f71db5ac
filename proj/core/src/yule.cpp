#include "sweepsim/yule.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "sweepsim/parallel.hpp"
#include "sweepsim/rng.hpp"

namespace sweepsim {
namespace {

// Union-find over subtree vertices; only unmarked branches are united, so two
// leaves end in one class iff no mark separates them.
struct Dsu {
  std::vector<int> parent;
  int add() {
    parent.push_back(static_cast<int>(parent.size()));
    return parent.back();
  }
  int find(int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

std::vector<std::vector<int>> sorted_blocks(std::map<int, std::vector<int>> by_key) {
  std::vector<std::vector<int>> blocks;
  for (auto& [key, members] : by_key) {
    std::sort(members.begin(), members.end());
    blocks.push_back(std::move(members));
  }
  std::sort(blocks.begin(), blocks.end());
  return blocks;
}

}  // namespace

int YuleForest::tree_count() const {
  int trees = 0;
  for (const auto& b : branches) trees += (b.parent == kImmigrantRoot) ? 1 : 0;
  return trees;
}

void YuleForest::check_invariants() const {
  auto fail = [](const std::string& what) {
    throw std::logic_error("YuleForest invariant violated: " + what);
  };
  if (final_level < 1) fail("final_level < 1");
  if (static_cast<int>(branches.size()) != final_level)
    fail("branch count != final_level (one line born per level)");
  int trees = 0;
  for (int j = 0; j < static_cast<int>(branches.size()); ++j) {
    const auto& b = branches[j];
    if (b.start_level != j + 1) fail("birth levels out of order");
    if (b.end_level != final_level) fail("line does not persist to final level");
    if (b.parent == kImmigrantRoot) {
      if (b.tree_id != trees) fail("immigrant tree ids not consecutive");
      ++trees;
    } else {
      if (b.parent < 0 || b.parent >= j) fail("parent not alive at start level");
      if (b.tree_id != branches[b.parent].tree_id) fail("tree id mismatch");
    }
  }
}

void YuleForest::write_text(std::ostream& out) const {
  out << "# id parent start_level end_level tree\n";
  for (int j = 0; j < static_cast<int>(branches.size()); ++j) {
    const auto& b = branches[j];
    out << j << ' ' << b.parent << ' ' << b.start_level << ' ' << b.end_level
        << ' ' << b.tree_id << '\n';
  }
}

YuleForest grow_forest(double alpha, double theta, std::mt19937_64& rng,
                       StoppingRule rule) {
  if (!(alpha > 0.0) || !(theta >= 0.0))
    throw ConfigError("grow_forest: need alpha > 0, theta >= 0");
  int final_level = static_cast<int>(std::floor(2.0 * alpha));
  if (rule == StoppingRule::kPoisson) {
    std::poisson_distribution<int> pois(2.0 * alpha);
    do {
      final_level = pois(rng);
    } while (final_level < 1);
  }
  if (final_level < 1) throw ConfigError("grow_forest: floor(2*alpha) < 1");

  YuleForest forest;
  forest.final_level = final_level;
  forest.branches.reserve(final_level);
  forest.branches.push_back({1, final_level, kImmigrantRoot, 0});
  int trees = 1;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 1; i < final_level; ++i) {
    if (unif(rng) * (theta + i) < i) {
      std::uniform_int_distribution<int> pick(0, i - 1);
      const int parent = pick(rng);
      forest.branches.push_back(
          {i + 1, final_level, parent, forest.branches[parent].tree_id});
    } else {
      forest.branches.push_back({i + 1, final_level, kImmigrantRoot, trees++});
    }
  }
  return forest;
}

MarkingModel::MarkingModel(int final_level, double gamma, double theta,
                           double alpha) {
  if (final_level < 1 || !(alpha > 1.0) || !(gamma >= 0.0) || !(theta >= 0.0))
    throw ConfigError("MarkingModel: invalid parameters");
  coeff_ = gamma / std::log(alpha);
  prefix_.resize(final_level + 1, 0.0);
  for (int i = 1; i <= final_level; ++i) {
    prefix_[i] = prefix_[i - 1] + 1.0 / (i + theta);
  }
}

double MarkingModel::p_between(int i1, int i2) const {
  if (i1 < 1 || i1 > i2 || i2 >= static_cast<int>(prefix_.size()))
    throw std::invalid_argument("p_between: need 1 <= i1 <= i2 <= final_level");
  return std::exp(-coeff_ * (prefix_[i2] - prefix_[i1]));
}

void MarkedSample::check_invariants() const {
  const int n = static_cast<int>(leaves.size());
  auto check_partition = [&](const std::vector<std::vector<int>>& blocks,
                             const char* name) {
    std::vector<int> seen(n, 0);
    for (const auto& b : blocks) {
      if (b.empty()) throw std::logic_error(std::string(name) + ": empty block");
      for (int m : b) {
        if (m < 0 || m >= n || seen[m]++)
          throw std::logic_error(std::string(name) + ": not a partition");
      }
    }
    for (int i = 0; i < n; ++i) {
      if (!seen[i]) throw std::logic_error(std::string(name) + ": index missing");
    }
  };
  check_partition(partition_tilde, "partition_tilde");
  check_partition(partition, "partition");
  // Refinement: every Upsilon block lies inside one same-tree block.
  for (const auto& blk : partition) {
    bool contained = false;
    for (const auto& tilde : partition_tilde) {
      contained = contained ||
                  std::includes(tilde.begin(), tilde.end(), blk.begin(), blk.end());
    }
    if (!contained)
      throw std::logic_error("partition does not refine partition_tilde");
  }
}

MarkedSample sample_and_mark(const YuleForest& forest, int n,
                             const MarkingModel& marking, std::mt19937_64& rng) {
  const int L = forest.final_level;
  if (n < 1 || n > L)
    throw ConfigError("sample_and_mark: need 1 <= n <= final_level");

  MarkedSample out;

  // Uniform sample of n distinct leaves.
  std::vector<int> all(L);
  std::iota(all.begin(), all.end(), 0);
  std::sample(all.begin(), all.end(), std::back_inserter(out.leaves), n, rng);

  // Root-first ancestry chains.
  std::vector<std::vector<int>> chains(n);
  for (int s = 0; s < n; ++s) {
    for (int id = out.leaves[s]; id != kImmigrantRoot;
         id = forest.branches[id].parent) {
      chains[s].push_back(id);
    }
    std::reverse(chains[s].begin(), chains[s].end());
  }

  // Same-tree partition (Upsilon-tilde).
  std::map<int, std::vector<int>> by_tree;
  for (int s = 0; s < n; ++s) {
    by_tree[forest.branches[out.leaves[s]].tree_id].push_back(s);
  }
  out.partition_tilde = sorted_blocks(by_tree);

  // Merge level of two same-tree leaves: the level below the birth of the
  // earlier-born branch at which their chains diverge.
  auto merge_level = [&](int s1, int s2) {
    const auto &c1 = chains[s1], &c2 = chains[s2];
    std::size_t d = 0;
    while (d < c1.size() && d < c2.size() && c1[d] == c2[d]) ++d;
    int level = L + 1;
    if (d < c1.size()) level = std::min(level, forest.branches[c1[d]].start_level);
    if (d < c2.size()) level = std::min(level, forest.branches[c2[d]].start_level);
    return level - 1;
  };

  // Build the induced subtree per tree, mark branches, and union leaves
  // across unmarked branches.  Branches rootward of the sampled leaves' MRCA
  // cannot separate any two sampled leaves and are omitted.
  Dsu dsu;
  for (int s = 0; s < n; ++s) dsu.add();  // vertex s = leaf s

  std::function<std::pair<int, int>(const std::vector<int>&)> cluster =
      [&](const std::vector<int>& leaves_in) -> std::pair<int, int> {
    if (leaves_in.size() == 1) return {leaves_in[0], L};
    int m0 = L + 1;
    for (std::size_t i = 0; i < leaves_in.size(); ++i) {
      for (std::size_t j = i + 1; j < leaves_in.size(); ++j) {
        m0 = std::min(m0, merge_level(leaves_in[i], leaves_in[j]));
      }
    }
    // Group leaves that stay together above this vertex.
    std::vector<std::vector<int>> groups;
    for (int s : leaves_in) {
      bool placed = false;
      for (auto& grp : groups) {
        if (merge_level(grp.front(), s) > m0) {
          grp.push_back(s);
          placed = true;
          break;
        }
      }
      if (!placed) groups.push_back({s});
    }
    const int v = dsu.add();
    for (const auto& grp : groups) {
      auto [child_vertex, child_level] = cluster(grp);
      const bool marked =
          std::uniform_real_distribution<double>(0.0, 1.0)(rng) <
          marking.mark_prob(m0, child_level);
      out.segments.push_back({m0, child_level, marked});
      if (!marked) dsu.unite(v, child_vertex);
    }
    return {v, m0};
  };
  for (const auto& tree_leaves : out.partition_tilde) cluster(tree_leaves);

  std::map<int, std::vector<int>> by_class;
  for (int s = 0; s < n; ++s) by_class[dsu.find(s)].push_back(s);
  out.partition = sorted_blocks(std::move(by_class));

  out.check_invariants();
  return out;
}

MarkedSample sample_and_mark(const YuleForest& forest, int n, double gamma,
                             double theta, double alpha, std::mt19937_64& rng) {
  MarkingModel marking(forest.final_level, gamma, theta, alpha);
  return sample_and_mark(forest, n, marking, rng);
}

ComposedGenealogy compose_with_kingman(const MarkedSample& sample,
                                       std::mt19937_64& rng) {
  ComposedGenealogy out;
  out.times.push_back(0.0);
  out.partitions.push_back(sample.partition);
  std::exponential_distribution<double> expo(1.0);
  double t = 0.0;
  while (out.partitions.back().size() > 1) {
    auto blocks = out.partitions.back();
    const int k = static_cast<int>(blocks.size());
    t += expo(rng) / (k * (k - 1) / 2.0);
    std::uniform_int_distribution<int> d(0, k - 1);
    int i = d(rng), j = d(rng);
    while (j == i) j = d(rng);
    auto& dst = blocks[std::min(i, j)];
    auto& src = blocks[std::max(i, j)];
    dst.insert(dst.end(), src.begin(), src.end());
    std::sort(dst.begin(), dst.end());
    blocks.erase(blocks.begin() + std::max(i, j));
    std::sort(blocks.begin(), blocks.end());
    out.times.push_back(t);
    out.partitions.push_back(std::move(blocks));
  }
  return out;
}

PairIdentityEstimate pair_identity_prob_mc(const SweepParams& params, long draws,
                                           int workers,
                                           std::uint64_t cell_index) {
  if (draws < 1) throw ConfigError("pair_identity_prob_mc: draws >= 1");
  params.validate();
  const int final_level = static_cast<int>(std::floor(2.0 * params.alpha));
  const MarkingModel marking(final_level, params.gamma, params.theta,
                             params.alpha);

  std::vector<signed char> identical(draws, 0);
  parallel_for_indexed(draws, workers, [&](std::int64_t d) {
    auto rng = make_stream(params.seed, cell_index, static_cast<std::uint64_t>(d));
    YuleForest forest = grow_forest(params.alpha, params.theta, rng);
    MarkedSample sample = sample_and_mark(forest, 2, marking, rng);
    identical[d] = sample.partition.size() == 1 ? 1 : 0;
  });

  PairIdentityEstimate est;
  est.draws = draws;
  long count = 0;
  for (signed char c : identical) count += c;
  est.mean = static_cast<double>(count) / draws;
  est.std_error = std::sqrt(est.mean * (1.0 - est.mean) / draws);
  return est;
}

}  // namespace sweepsim
