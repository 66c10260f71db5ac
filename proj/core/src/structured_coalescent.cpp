#include "sweepsim/structured_coalescent.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "sweepsim/parallel.hpp"
#include "sweepsim/rng.hpp"

namespace sweepsim {
namespace {

// Internal lineage representation: a block of sample indices plus the
// background it currently sits on.
struct Line {
  bool in_B = true;
  std::vector<int> members;
};

std::vector<Line> initial_lines(int n) {
  std::vector<Line> lines(n);
  for (int i = 0; i < n; ++i) lines[i].members = {i};
  return lines;
}

CoalescentState to_state(const std::vector<Line>& lines, double beta) {
  CoalescentState st;
  st.beta = beta;
  for (const auto& l : lines) {
    (l.in_B ? st.blocks_B : st.blocks_b).push_back(l.members);
  }
  return st;
}

void log_event(EventLog& log, double beta, EventKind kind,
               std::vector<int> participants) {
  log.events.push_back({beta, kind, std::move(participants)});
}

void merge_into(std::vector<Line>& lines, int keep, int drop) {
  auto& dst = lines[keep].members;
  auto& src = lines[drop].members;
  dst.insert(dst.end(), src.begin(), src.end());
  std::sort(dst.begin(), dst.end());
  lines.erase(lines.begin() + drop);
}

void check_lines(const std::vector<Line>& lines, int n, double beta) {
  to_state(lines, beta).check_partition(n);
}

// Resolves the remaining B lineages when the beneficial frequency is exactly
// 0: competing 1/X coalescence and mutation rates reduce to Hoppe's-urn
// proportions (k-1) : theta, and the last lineage leaves via its founding
// mutation.
void resolve_at_zero(std::vector<Line>& lines, double theta, double beta,
                     EventLog& log, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (;;) {
    std::vector<int> b_ids;
    for (int i = 0; i < static_cast<int>(lines.size()); ++i) {
      if (lines[i].in_B) b_ids.push_back(i);
    }
    const int k = static_cast<int>(b_ids.size());
    if (k == 0) return;
    if (k == 1 || unif(rng) * (k - 1 + theta) >= k - 1) {
      // Founding mutation moves one lineage to the wild-type side.
      std::uniform_int_distribution<int> pick(0, k - 1);
      int id = b_ids[pick(rng)];
      lines[id].in_B = false;
      log_event(log, beta, EventKind::kMutToWild, {id});
    } else {
      std::uniform_int_distribution<int> pick(0, k - 1);
      int i = pick(rng), j = pick(rng);
      while (j == i) j = pick(rng);
      int keep = b_ids[std::min(i, j)], drop = b_ids[std::max(i, j)];
      log_event(log, beta, EventKind::kCoalB, {keep, drop});
      merge_into(lines, keep, drop);
    }
  }
}

// --- Exact discrete backward pass (Wright-Fisher paths, full rates) ---------
//
// Walks generation by generation from fixation back to the last zero.  Each
// lineage samples its parent from the discrete model's backward transition
// law; lineages landing on the same parent coalesce.
BackwardResult run_backward_discrete(const FrequencyPath& path,
                                     const SweepParams& params,
                                     std::mt19937_64& rng) {
  const long N = params.pop_size;
  const double s = params.s();
  const double u = params.u();
  const double r = params.r();
  const double T = path.fixation_time();

  // For theta >= 1, t0_index is pinned to 0 (inaccessible boundary), so the
  // pass runs over the whole path including any early zero excursions.
  const std::size_t g0 = path.t0_index;

  std::vector<Line> lines = initial_lines(params.sample_size);
  EventLog log;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::size_t checked_events = 0;

  for (std::size_t g = path.fixation_index; g > g0; --g) {
    const long k_par = path.copies_at(g - 1);
    const double x = static_cast<double>(k_par) / N;
    const double w = (1.0 + s) * x;
    const double denom = w + u * (1.0 - x);
    const double a = denom > 0.0 ? w / denom : 0.0;  // P[parent B | child B, no rec]
    const double beta = T - path.times[g - 1];

    // (background, parent index) -> line id; collisions coalesce.
    std::map<std::pair<bool, long>, int> occupied;
    std::uniform_int_distribution<long> pick_B(0, std::max(k_par - 1, 0L));
    std::uniform_int_distribution<long> pick_b(0, std::max(N - k_par - 1, 0L));

    for (int id = 0; id < static_cast<int>(lines.size()); ++id) {
      Line& line = lines[id];
      bool parent_B;
      if (line.in_B) {
        if (unif(rng) < r) {
          // Neutral locus recombined onto a uniformly drawn background.
          parent_B = unif(rng) < x;
          if (!parent_B) log_event(log, beta, EventKind::kRecToWild, {id});
        } else {
          parent_B = unif(rng) < a;
          if (!parent_B) log_event(log, beta, EventKind::kMutToWild, {id});
        }
      } else {
        parent_B = (unif(rng) < r) && (unif(rng) < x);
        if (parent_B) log_event(log, beta, EventKind::kRecToB, {id});
      }
      line.in_B = parent_B;
      const long parent = parent_B ? pick_B(rng) : pick_b(rng);
      auto [it, fresh] = occupied.try_emplace({parent_B, parent}, id);
      if (!fresh) {
        const int keep = it->second;
        log_event(log, beta,
                  parent_B ? EventKind::kCoalB : EventKind::kCoalWild,
                  {keep, id});
        merge_into(lines, keep, id);
        // Re-key ids above the erased slot.
        for (auto& [key, lid] : occupied) {
          if (lid > id) --lid;
        }
        --id;
      }
    }
    // Partition validity is asserted whenever this generation produced events
    // (events are rare, so this stays off the per-generation hot path).
    if (log.events.size() != checked_events) {
      check_lines(lines, params.sample_size, beta);
      checked_events = log.events.size();
    }
    if (lines.size() == 1 && !lines[0].in_B && k_par > 0) {
      // A single wild-type lineage can only coalesce with itself; nothing
      // further can happen until beta0, so the per-generation walk may stop
      // early only if no b->B recombination is possible.  Keep walking when
      // rho > 0 (the lineage may still re-enter B).
      if (r == 0.0) break;
    }
  }

  // Anything still in B at the establishment generation leaves through its
  // founding mutation (the copy count at g0 is zero).
  resolve_at_zero(lines, params.theta, T - path.times[g0], log, rng);
  check_lines(lines, params.sample_size, T - path.times[g0]);
  return {to_state(lines, T - path.times[g0]), std::move(log)};
}

// --- Gillespie pass (diffusion paths, and the simplified-rates mode) --------
BackwardResult run_backward_gillespie(const FrequencyPath& path,
                                      const SweepParams& params, RatesMode mode,
                                      std::mt19937_64& rng) {
  const double theta = params.theta;
  const double rho = params.rho;
  const double T = path.fixation_time();
  const std::size_t g0 = path.t0_index;

  std::vector<Line> lines = initial_lines(params.sample_size);
  EventLog log;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);

  for (std::size_t g = path.fixation_index; g > g0; --g) {
    const double x = path.values[g - 1];
    const double beta_lo = T - path.times[g];
    const double beta_hi = T - path.times[g - 1];
    if (x == 0.0) {
      // Zero excursion inside a theta >= 1 path: the diverging mutation and
      // coalescence rates clear B instantly at the cell boundary.
      resolve_at_zero(lines, theta, beta_lo, log, rng);
    }
    double beta = beta_lo;
    for (;;) {
      int kB = 0;
      for (const auto& l : lines) kB += l.in_B ? 1 : 0;
      const int kb = static_cast<int>(lines.size()) - kB;

      double rate_coal_B = 0.0, rate_coal_b = 0.0, rate_mut = 0.0;
      double rate_rec_Bb = 0.0, rate_rec_bB = 0.0;
      if (x > 0.0) {
        if (mode == RatesMode::kFull) {
          rate_coal_B = kB * (kB - 1) / 2.0 / x;
          rate_coal_b = x < 1.0 ? kb * (kb - 1) / 2.0 / (1.0 - x) : 0.0;
          rate_rec_bB = kb * rho * x;
        } else {
          rate_coal_B = kB * (kB - 1) / 2.0 * (1.0 - x) / x;
        }
        rate_mut = kB * (theta / 2.0) * (1.0 - x) / x;
        rate_rec_Bb = kB * rho * (1.0 - x);
      } else if (mode == RatesMode::kFull) {
        rate_coal_b = kb * (kb - 1) / 2.0;
      }
      const double total =
          rate_coal_B + rate_coal_b + rate_mut + rate_rec_Bb + rate_rec_bB;
      if (total <= 0.0) break;
      const double wait = expo(rng) / total;
      if (beta + wait > beta_hi) break;
      beta += wait;

      double pick = unif(rng) * total;
      auto pick_line = [&](bool in_B) {
        std::vector<int> ids;
        for (int i = 0; i < static_cast<int>(lines.size()); ++i) {
          if (lines[i].in_B == in_B) ids.push_back(i);
        }
        std::uniform_int_distribution<int> d(0, static_cast<int>(ids.size()) - 1);
        return ids[d(rng)];
      };
      auto pick_pair = [&](bool in_B) {
        std::vector<int> ids;
        for (int i = 0; i < static_cast<int>(lines.size()); ++i) {
          if (lines[i].in_B == in_B) ids.push_back(i);
        }
        std::uniform_int_distribution<int> d(0, static_cast<int>(ids.size()) - 1);
        int i = d(rng), j = d(rng);
        while (j == i) j = d(rng);
        return std::pair<int, int>{ids[std::min(i, j)], ids[std::max(i, j)]};
      };

      if ((pick -= rate_coal_B) < 0.0) {
        auto [keep, drop] = pick_pair(true);
        log_event(log, beta, EventKind::kCoalB, {keep, drop});
        merge_into(lines, keep, drop);
      } else if ((pick -= rate_coal_b) < 0.0) {
        auto [keep, drop] = pick_pair(false);
        log_event(log, beta, EventKind::kCoalWild, {keep, drop});
        merge_into(lines, keep, drop);
      } else if ((pick -= rate_mut) < 0.0) {
        int id = pick_line(true);
        lines[id].in_B = false;
        log_event(log, beta, EventKind::kMutToWild, {id});
      } else if ((pick -= rate_rec_Bb) < 0.0) {
        int id = pick_line(true);
        lines[id].in_B = false;
        log_event(log, beta, EventKind::kRecToWild, {id});
      } else {
        int id = pick_line(false);
        lines[id].in_B = true;
        log_event(log, beta, EventKind::kRecToB, {id});
      }
      check_lines(lines, params.sample_size, beta);
    }
  }

  const double beta0 = T - path.times[g0];
  resolve_at_zero(lines, theta, beta0, log, rng);
  check_lines(lines, params.sample_size, beta0);
  return {to_state(lines, beta0), std::move(log)};
}

}  // namespace

const char* event_kind_name(EventKind kind) {
  switch (kind) {
    case EventKind::kCoalB: return "coal-B";
    case EventKind::kCoalWild: return "coal-b";
    case EventKind::kMutToWild: return "mut-B-b";
    case EventKind::kRecToWild: return "rec-B-b";
    case EventKind::kRecToB: return "rec-b-B";
  }
  return "?";
}

std::array<long, kEventKindCount> EventLog::counts() const {
  std::array<long, kEventKindCount> c{};
  for (const auto& e : events) ++c[static_cast<int>(e.kind)];
  return c;
}

void EventLog::write_csv(std::ostream& out) const {
  out << "beta,kind,participants\n";
  for (const auto& e : events) {
    out << e.beta << ',' << event_kind_name(e.kind) << ',';
    for (std::size_t i = 0; i < e.participants.size(); ++i) {
      if (i) out << ' ';
      out << e.participants[i];
    }
    out << '\n';
  }
}

void CoalescentState::check_partition(int n) const {
  std::vector<int> seen(n, 0);
  auto visit = [&](const std::vector<std::vector<int>>& blocks) {
    for (const auto& b : blocks) {
      if (b.empty()) throw std::logic_error("CoalescentState: empty block");
      for (int m : b) {
        if (m < 0 || m >= n || seen[m]++)
          throw std::logic_error("CoalescentState: not a partition of the sample");
      }
    }
  };
  visit(blocks_B);
  visit(blocks_b);
  for (int i = 0; i < n; ++i) {
    if (!seen[i]) throw std::logic_error("CoalescentState: sample index missing");
  }
  if (beta < 0.0) throw std::logic_error("CoalescentState: negative beta");
}

BackwardResult run_backward(const FrequencyPath& path, const SweepParams& params,
                            RatesMode mode, std::mt19937_64& rng) {
  if (path.times.empty() || path.values[path.fixation_index] != 1.0) {
    throw std::invalid_argument("run_backward: path incomplete");
  }
  if (mode == RatesMode::kFull && path.model == PathModel::kDiscreteWf) {
    return run_backward_discrete(path, params, rng);
  }
  return run_backward_gillespie(path, params, mode, rng);
}

KingmanTail kingman_tail(const CoalescentState& state, std::mt19937_64& rng) {
  if (!state.blocks_B.empty()) {
    throw std::invalid_argument("kingman_tail: blocks_B must be empty");
  }
  KingmanTail tail;
  int k = static_cast<int>(state.blocks_b.size());
  std::vector<int> ids(k);
  for (int i = 0; i < k; ++i) ids[i] = i;
  std::exponential_distribution<double> expo(1.0);
  while (k > 1) {
    tail.waiting_times.push_back(expo(rng) / (k * (k - 1) / 2.0));
    std::uniform_int_distribution<int> d(0, k - 1);
    int i = d(rng), j = d(rng);
    while (j == i) j = d(rng);
    tail.merges.emplace_back(ids[std::min(i, j)], ids[std::max(i, j)]);
    ids.erase(ids.begin() + std::max(i, j));
    --k;
  }
  return tail;
}

HetRatioEstimate estimate_het_ratio(const SweepParams& params, long replicates,
                                    int workers, std::uint64_t cell_index) {
  if (replicates < 1) throw ConfigError("estimate_het_ratio: replicates >= 1");
  SweepParams p = params;
  p.sample_size = 2;
  p.validate();

  // 1 = distinct ancestors, 0 = common ancestor, -1 = replicate failed.
  std::vector<signed char> outcome(replicates, -1);
  parallel_for_indexed(replicates, workers, [&](std::int64_t rep) {
    auto rng = make_stream(p.seed, cell_index, static_cast<std::uint64_t>(rep));
    try {
      FrequencyPath path = simulate_wf_path(p, rng);
      BackwardResult res = run_backward(path, p, RatesMode::kFull, rng);
      outcome[rep] = res.state.block_count() == 2 ? 1 : 0;
    } catch (const PathBudgetExceeded&) {
      outcome[rep] = -1;
    }
  });

  HetRatioEstimate est;
  long distinct = 0;
  for (signed char o : outcome) {
    if (o < 0) {
      ++est.failures;
    } else {
      ++est.replicates;
      distinct += o;
    }
  }
  if (est.replicates > 0) {
    est.mean = static_cast<double>(distinct) / est.replicates;
    est.std_error =
        std::sqrt(est.mean * (1.0 - est.mean) / est.replicates);
  }
  return est;
}

}  // namespace sweepsim
