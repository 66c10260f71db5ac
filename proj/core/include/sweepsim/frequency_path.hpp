// =============================================================================
// frequency_path.hpp — fixation trajectories of the beneficial allele.
//
// Two generators produce a FrequencyPath:
//
//   simulate_wf_path        discrete Wright-Fisher model with selection s,
//                           recurrent mutation u, population size N
//   simulate_diffusion_path Euler-Maruyama integration of
//                           dX = (theta/2 + alpha*X)(1-X)dt + sqrt(X(1-X))dW
//
// Both run until fixation (X = 1) and record the full trajectory on a uniform
// grid: one point per generation (spacing 1/N in diffusion time) for the WF
// model, one point per Euler step for the diffusion.  The path also carries
// the two time markers of interest:
//
//   T   = times[fixation_index]  first time the frequency hits 1
//   T0  = times[t0_index]        last time the frequency is 0
//   T*  = T - T0                 duration of the actual sweep
//
// For theta >= 1 the zero boundary is inaccessible in the diffusion limit, so
// T0 is defined to be 0 even though the finite-N chain makes brief excursions
// back to 0 before establishment (the last-zero functional is not continuous
// under the diffusion limit; the excursions vanish only in law, not per path).
// =============================================================================
#pragma once

#include <cstddef>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "sweepsim/params.hpp"

namespace sweepsim {

enum class PathModel { kDiscreteWf, kEulerMaruyama };

/// Thrown when a replicate exhausts its generation/step budget before
/// fixation.  Distinguishable from parameter errors so the harness can count
/// it as a replicate failure rather than aborting the run.
struct PathBudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FrequencyPath {
  PathModel model = PathModel::kDiscreteWf;
  double alpha = 0.0;
  double theta = 0.0;
  int pop_size = 0;  // N of the generator (grid spacing 1/N for WF paths)

  std::vector<double> times;   // strictly increasing, units of N generations
  std::vector<double> values;  // frequency in [0,1]
  std::size_t t0_index = 0;
  std::size_t fixation_index = 0;

  double t0() const { return times[t0_index]; }
  double fixation_time() const { return times[fixation_index]; }
  double sweep_duration() const { return fixation_time() - t0(); }

  /// Beneficial copy count at grid index i (WF paths only).
  long copies_at(std::size_t i) const {
    return std::lround(values[i] * pop_size);
  }

  /// Throws std::logic_error if any structural invariant is violated.
  void check_invariants() const;
};

struct PathDecomposition {
  double t0 = 0.0;
  double t_star = 0.0;
  double t_fix = 0.0;
};

/// Splits a complete path into (T0, T*, T).  Throws if the path is empty or
/// did not reach fixation.
PathDecomposition decompose_path(const FrequencyPath& path);

/// Forward Wright-Fisher simulation from X = 0 until fixation.
/// Per generation: N*X' ~ Binomial(N, ((1+s)X + u(1-X)) / ((1+s)X + 1-X)).
/// For theta = 0 a single copy is injected and the run restarts (clock reset)
/// whenever the allele is lost, yielding the hard-sweep path conditioned on
/// fixation.
FrequencyPath simulate_wf_path(const SweepParams& params, std::mt19937_64& rng);

/// Euler-Maruyama integration of the frequency diffusion from X = 0 until
/// absorption at 1, with step dt (default 1e-2/alpha when dt <= 0 is passed).
/// Negative proposals are clamped to 0 (the drift theta/2 re-enters); for
/// theta = 0 the allele starts from a single copy 1/N and lost paths restart,
/// mirroring the WF generator.
FrequencyPath simulate_diffusion_path(const SweepParams& params, double dt,
                                      std::mt19937_64& rng);

/// Writes "time,frequency" CSV rows (with header) for debugging/plotting.
void write_path_csv(const FrequencyPath& path, std::ostream& out);

}  // namespace sweepsim
