#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "sweepsim/analytics.hpp"
#include "sweepsim/frequency_path.hpp"
#include "sweepsim/rng.hpp"

using namespace sweepsim;

namespace {

struct Moments {
  double mean = 0.0, se = 0.0, var = 0.0;
};

Moments moments(const std::vector<double>& xs) {
  Moments m;
  for (double x : xs) m.mean += x;
  m.mean /= xs.size();
  for (double x : xs) m.var += (x - m.mean) * (x - m.mean);
  m.var /= (xs.size() - 1);
  m.se = std::sqrt(m.var / xs.size());
  return m;
}

}  // namespace

TEST_CASE("forward simulation is reproducible for a fixed stream") {
  const SweepParams p = SweepParams::with_rho(200.0, 0.5, 0.0, 4000, 2, 99);
  auto r1 = make_stream(p.seed, 0, 0);
  auto r2 = make_stream(p.seed, 0, 0);
  const FrequencyPath a = simulate_wf_path(p, r1);
  const FrequencyPath b = simulate_wf_path(p, r2);
  CHECK(a.values == b.values);
  CHECK(a.times == b.times);
  CHECK(a.t0_index == b.t0_index);
  auto r3 = make_stream(p.seed, 0, 1);
  const FrequencyPath c = simulate_wf_path(p, r3);
  CHECK(a.values != c.values);
}

TEST_CASE("paths satisfy their structural invariants") {
  for (std::uint64_t rep = 0; rep < 5; ++rep) {
    for (double theta : {0.0, 0.5, 1.0, 2.0}) {
      const SweepParams p =
          SweepParams::with_rho(200.0, theta, 0.0, 4000, 2, 7);
      auto rng = make_stream(p.seed, 1, rep);
      const FrequencyPath path = simulate_wf_path(p, rng);
      CHECK_NOTHROW(path.check_invariants());
      CHECK(path.values.back() == 1.0);
      CHECK(path.fixation_index == path.values.size() - 1);
      CHECK(path.values[path.t0_index] == 0.0);
      const PathDecomposition d = decompose_path(path);
      CHECK(d.t_fix == doctest::Approx(d.t0 + d.t_star).epsilon(1e-12));
    }
  }
}

TEST_CASE("without recurrent mutation the path is a single-origin sweep") {
  const SweepParams p = SweepParams::with_rho(200.0, 0.0, 0.0, 4000, 2, 11);
  for (std::uint64_t rep = 0; rep < 5; ++rep) {
    auto rng = make_stream(p.seed, 2, rep);
    const FrequencyPath path = simulate_wf_path(p, rng);
    // Clock restarts on loss: the kept path starts 0 -> one copy and never
    // returns to zero.
    CHECK(path.t0_index == 0);
    CHECK(path.values[0] == 0.0);
    CHECK(path.copies_at(1) == 1);
    for (std::size_t i = 1; i < path.values.size(); ++i) {
      CHECK(path.values[i] > 0.0);
    }
  }
}

TEST_CASE("with strong mutation pressure the establishment marker is the "
          "origin of time") {
  for (double theta : {1.0, 2.0}) {
    const SweepParams p = SweepParams::with_rho(200.0, theta, 0.0, 4000, 2, 5);
    for (std::uint64_t rep = 0; rep < 5; ++rep) {
      auto rng = make_stream(p.seed, 3, rep);
      CHECK(simulate_wf_path(p, rng).t0_index == 0);
      auto rng2 = make_stream(p.seed, 4, rep);
      CHECK(simulate_diffusion_path(p, 0.0, rng2).t0_index == 0);
    }
  }
}

TEST_CASE("an exhausted generation budget raises the replicate-failure "
          "exception") {
  SweepParams p = SweepParams::with_rho(200.0, 0.5, 0.0, 4000, 2, 13);
  p.generation_budget = 10;
  auto rng = make_stream(p.seed, 5, 0);
  CHECK_THROWS_AS(simulate_wf_path(p, rng), PathBudgetExceeded);
  auto rng2 = make_stream(p.seed, 6, 0);
  CHECK_THROWS_AS(simulate_diffusion_path(p, 0.0, rng2), PathBudgetExceeded);
}

TEST_CASE("simulated sweep duration matches the closed form at moderate "
          "selection") {
  // alpha = 200, N = 10^4, theta = 0: conditioned-on-fixation hard sweeps.
  const SweepParams p = SweepParams::with_rho(200.0, 0.0, 0.0, 10'000, 2, 21);
  const long reps = 400;
  std::vector<double> tstar(reps);
  for (long i = 0; i < reps; ++i) {
    auto rng = make_stream(p.seed, 7, static_cast<std::uint64_t>(i));
    tstar[i] = decompose_path(simulate_wf_path(p, rng)).t_star;
  }
  const Moments m = moments(tstar);
  const double predicted = expected_Tstar(200.0);
  CHECK(std::abs(m.mean - predicted) < 3.0 * m.se + 2e-3 * predicted);
  CHECK(m.var * 200.0 * 200.0 < kVarTstarConstant);
}

TEST_CASE("discrete and diffusion generators agree on the sweep duration "
          "distribution") {
  // Weak per-generation selection (s = 0.01) so both sit near the common limit.
  const SweepParams p =
      SweepParams::with_rho(1000.0, 0.5, 0.0, 100'000, 2, 33);
  const long reps = 300;
  std::vector<double> wf(reps), em(reps);
  for (long i = 0; i < reps; ++i) {
    auto r1 = make_stream(p.seed, 8, static_cast<std::uint64_t>(i));
    wf[i] = decompose_path(simulate_wf_path(p, r1)).t_star;
    auto r2 = make_stream(p.seed, 9, static_cast<std::uint64_t>(i));
    em[i] = decompose_path(simulate_diffusion_path(p, 0.0, r2)).t_star;
  }
  const Moments mw = moments(wf), me = moments(em);
  const double combined = std::sqrt(mw.se * mw.se + me.se * me.se);
  CHECK(std::abs(mw.mean - me.mean) < 3.0 * combined);
}

TEST_CASE("path csv dump has one row per grid point") {
  const SweepParams p = SweepParams::with_rho(200.0, 0.5, 0.0, 4000, 2, 3);
  auto rng = make_stream(p.seed, 10, 0);
  const FrequencyPath path = simulate_wf_path(p, rng);
  std::ostringstream out;
  write_path_csv(path, out);
  const std::string text = out.str();
  const long rows = std::count(text.begin(), text.end(), '\n');
  CHECK(rows == static_cast<long>(path.values.size()) + 1);
  CHECK(text.rfind("time,frequency", 0) == 0);
}
