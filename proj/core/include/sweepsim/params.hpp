// =============================================================================
// params.hpp — shared parameter bundle for all sweep-simulation modules.
//
// Everything downstream (forward paths, backward genealogies, analytic
// formulas) consumes the same dimensionless parameters:
//
//   alpha = N*s   selection intensity
//   theta = 2*N*u population-scaled rate of the recurrent beneficial mutation
//   rho           population-scaled recombination rate between the selected
//                 and the neutral locus
//   gamma         recombination scale used by the Yule approximation and the
//                 closed-form heterozygosity formulas
//
// rho and gamma are two parameterisations of the same quantity, related by
//   rho = gamma * alpha / c(alpha)
// where the scale factor c depends on the chosen convention (see
// GammaConvention below).  Exactly one of {rho, gamma} is the source value;
// the other is derived.
//
// Time is measured in units of N generations throughout (the natural clock of
// the frequency diffusion dX = (theta/2 + alpha*X)(1-X)dt + sqrt(X(1-X))dW).
// =============================================================================
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace sweepsim {

inline constexpr double kEulerGamma = 0.5772156649015329;

/// How to convert between rho and gamma.
///
/// kLogAlpha:      gamma = rho * ln(alpha) / alpha.  The textbook scaling.
/// kSweepDuration: gamma = rho * (ln(2*alpha) + gamma_e) / alpha, i.e.
///                 2*gamma = rho * E[T*]: gamma measures expected
///                 recombination opportunity over half the sweep duration.
/// kCalibrated:    like kSweepDuration minus a fixed offset, fitted so that
///                 the closed-form heterozygosity formulas track
///                 Wright-Fisher simulations most closely across the
///                 benchmark grid (theta in {0,0.1,1}, rho in {2,5,10,50},
///                 alpha = 1000).  This is the default for comparisons
///                 against simulation.
enum class GammaConvention {
  kLogAlpha,
  kSweepDuration,
  kCalibrated,
};

/// Offset subtracted from ln(2*alpha) + gamma_e under kCalibrated.
inline constexpr double kCalibratedOffset = 0.36;

/// Scale factor c(alpha) with rho = gamma * alpha / c(alpha).
inline double gamma_scale_factor(double alpha, GammaConvention conv) {
  switch (conv) {
    case GammaConvention::kLogAlpha:
      return std::log(alpha);
    case GammaConvention::kSweepDuration:
      return std::log(2.0 * alpha) + kEulerGamma;
    case GammaConvention::kCalibrated:
      return std::log(2.0 * alpha) + kEulerGamma - kCalibratedOffset;
  }
  throw std::logic_error("unknown GammaConvention");
}

inline double gamma_from_rho(double alpha, double rho,
                             GammaConvention conv = GammaConvention::kLogAlpha) {
  return rho * gamma_scale_factor(alpha, conv) / alpha;
}

inline double rho_from_gamma(double alpha, double gamma,
                             GammaConvention conv = GammaConvention::kLogAlpha) {
  return gamma * alpha / gamma_scale_factor(alpha, conv);
}

/// Thrown on invalid parameter combinations (maps to CLI exit code 1).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SweepParams {
  double alpha = 1000.0;
  double theta = 0.0;
  double rho = 0.0;
  double gamma = 0.0;
  int pop_size = 10'000;    // N of the discrete Wright-Fisher model
  int sample_size = 2;      // n
  std::uint64_t seed = 0;
  // Hard cap on binomial draws (WF) or Euler steps (diffusion) per replicate.
  std::uint64_t generation_budget = 1'000'000'000ULL;

  /// Construct with rho as the source value; gamma derived.
  static SweepParams with_rho(double alpha, double theta, double rho,
                              int pop_size, int sample_size, std::uint64_t seed,
                              GammaConvention conv = GammaConvention::kLogAlpha) {
    SweepParams p;
    p.alpha = alpha;
    p.theta = theta;
    p.rho = rho;
    p.gamma = gamma_from_rho(alpha, rho, conv);
    p.pop_size = pop_size;
    p.sample_size = sample_size;
    p.seed = seed;
    p.validate();
    return p;
  }

  /// Construct with gamma as the source value; rho derived.
  static SweepParams with_gamma(double alpha, double theta, double gamma,
                                int pop_size, int sample_size, std::uint64_t seed,
                                GammaConvention conv = GammaConvention::kLogAlpha) {
    SweepParams p;
    p.alpha = alpha;
    p.theta = theta;
    p.gamma = gamma;
    p.rho = rho_from_gamma(alpha, gamma, conv);
    p.pop_size = pop_size;
    p.sample_size = sample_size;
    p.seed = seed;
    p.validate();
    return p;
  }

  /// Selection coefficient of the discrete model.
  double s() const { return alpha / pop_size; }
  /// Per-generation beneficial mutation probability of the discrete model.
  double u() const { return theta / (2.0 * pop_size); }
  /// Per-generation recombination probability of the discrete model.
  double r() const { return rho / pop_size; }

  void validate() const {
    if (!(alpha > 0.0)) throw ConfigError("alpha must be > 0");
    if (!(theta >= 0.0)) throw ConfigError("theta must be >= 0");
    if (!(rho >= 0.0)) throw ConfigError("rho must be >= 0");
    if (!(gamma >= 0.0)) throw ConfigError("gamma must be >= 0");
    if (pop_size < 2) throw ConfigError("pop_size must be >= 2");
    if (sample_size < 1) throw ConfigError("sample_size must be >= 1");
    if (pop_size <= alpha)
      throw ConfigError("pop_size must exceed alpha (need s = alpha/N < 1)");
    if (generation_budget == 0)
      throw ConfigError("generation_budget must be positive");
  }
};

}  // namespace sweepsim
