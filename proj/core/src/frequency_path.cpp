#include "sweepsim/frequency_path.hpp"

#include <cmath>
#include <ostream>

namespace sweepsim {

void FrequencyPath::check_invariants() const {
  auto fail = [](const std::string& what) {
    throw std::logic_error("FrequencyPath invariant violated: " + what);
  };
  if (times.empty() || times.size() != values.size()) fail("size mismatch");
  if (fixation_index >= times.size()) fail("fixation_index out of range");
  if (t0_index > fixation_index) fail("t0_index past fixation_index");
  if (values[fixation_index] != 1.0) fail("values[fixation_index] != 1");
  if (values[t0_index] != 0.0) fail("values[t0_index] != 0");
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    if (!(times[i] < times[i + 1])) fail("times not strictly increasing");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= 0.0 && values[i] <= 1.0)) fail("value outside [0,1]");
    if (i < fixation_index && values[i] >= 1.0) fail("hit 1 before fixation_index");
  }
  // Interior positivity: between the last zero and fixation the frequency is
  // positive.  For theta >= 1 t0_index is pinned to 0 by convention while the
  // finite-N chain may still revisit 0, so the check applies only for theta<1.
  if (theta < 1.0) {
    for (std::size_t i = t0_index + 1; i < fixation_index; ++i) {
      if (!(values[i] > 0.0)) fail("zero between t0_index and fixation_index");
    }
  }
}

PathDecomposition decompose_path(const FrequencyPath& path) {
  if (path.times.empty() || path.values[path.fixation_index] != 1.0) {
    throw std::invalid_argument("decompose_path: path incomplete (no fixation)");
  }
  PathDecomposition d;
  d.t0 = path.t0();
  d.t_fix = path.fixation_time();
  d.t_star = d.t_fix - d.t0;
  return d;
}

FrequencyPath simulate_wf_path(const SweepParams& params, std::mt19937_64& rng) {
  params.validate();
  const int N = params.pop_size;
  const double s = params.s();
  const double u = params.u();
  const bool hard_sweep = (params.theta == 0.0);

  FrequencyPath path;
  path.model = PathModel::kDiscreteWf;
  path.alpha = params.alpha;
  path.theta = params.theta;
  path.pop_size = N;

  std::vector<long> copies;
  copies.push_back(0);
  if (hard_sweep) copies.push_back(1);  // inject the founding mutant

  std::uint64_t draws = 0;
  for (;;) {
    long k = copies.back();
    if (k == N) break;
    if (++draws > params.generation_budget) {
      throw PathBudgetExceeded("WF path exceeded generation budget");
    }
    const double x = static_cast<double>(k) / N;
    const double w = (1.0 + s) * x;                  // selection-weighted mass
    const double p = (w + u * (1.0 - x)) / (w + 1.0 - x);
    std::binomial_distribution<long> binom(N, p);
    long next = binom(rng);
    if (hard_sweep && next == 0) {
      // Allele lost: restart the mutation-arrival phase (condition on
      // fixation by rejection; the clock resets with the new attempt).
      copies.assign({0, 1});
      continue;
    }
    copies.push_back(next);
  }

  const std::size_t len = copies.size();
  path.times.resize(len);
  path.values.resize(len);
  for (std::size_t i = 0; i < len; ++i) {
    path.times[i] = static_cast<double>(i) / N;
    path.values[i] = static_cast<double>(copies[i]) / N;
  }
  path.fixation_index = len - 1;
  path.t0_index = 0;
  if (params.theta > 0.0 && params.theta < 1.0) {
    for (std::size_t i = 0; i < len; ++i) {
      if (path.values[i] == 0.0) path.t0_index = i;
    }
  }
  path.check_invariants();
  return path;
}

FrequencyPath simulate_diffusion_path(const SweepParams& params, double dt,
                                      std::mt19937_64& rng) {
  params.validate();
  if (dt <= 0.0) dt = 1e-2 / params.alpha;
  const double alpha = params.alpha;
  const double theta = params.theta;
  const bool hard_sweep = (theta == 0.0);
  const double x_seed = 1.0 / params.pop_size;

  FrequencyPath path;
  path.model = PathModel::kEulerMaruyama;
  path.alpha = alpha;
  path.theta = theta;
  path.pop_size = params.pop_size;

  std::normal_distribution<double> gauss(0.0, 1.0);
  const double sqrt_dt = std::sqrt(dt);

  std::vector<double> values;
  values.push_back(0.0);
  if (hard_sweep) values.push_back(x_seed);

  std::uint64_t steps = 0;
  for (;;) {
    double x = values.back();
    if (x >= 1.0) break;
    if (++steps > params.generation_budget) {
      throw PathBudgetExceeded("diffusion path exceeded step budget");
    }
    const double drift = (theta / 2.0 + alpha * x) * (1.0 - x);
    const double var = x * (1.0 - x);
    double next = x + drift * dt;
    if (var > 0.0) next += std::sqrt(var) * sqrt_dt * gauss(rng);
    if (next >= 1.0) next = 1.0;
    if (next <= 0.0) {
      if (hard_sweep) {
        // Lost before fixation: restart from a fresh single copy.
        values.assign({0.0, x_seed});
        continue;
      }
      next = 0.0;  // clamp; the mutation drift theta/2 re-enters
    }
    values.push_back(next);
  }

  const std::size_t len = values.size();
  path.values = std::move(values);
  path.times.resize(len);
  for (std::size_t i = 0; i < len; ++i) path.times[i] = i * dt;
  path.fixation_index = len - 1;
  path.t0_index = 0;
  if (theta > 0.0 && theta < 1.0) {
    for (std::size_t i = 0; i < len; ++i) {
      if (path.values[i] == 0.0) path.t0_index = i;
    }
  }
  path.check_invariants();
  return path;
}

void write_path_csv(const FrequencyPath& path, std::ostream& out) {
  out << "time,frequency\n";
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    out << path.times[i] << ',' << path.values[i] << '\n';
  }
}

}  // namespace sweepsim
