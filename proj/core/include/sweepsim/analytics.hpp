// =============================================================================
// analytics.hpp — closed-form and quadrature-based predictions.
//
// Three families of results:
//
//  * Yule-approximation formulas for the heterozygosity ratio H_T/H_T0 of a
//    pair sampled at fixation: the asymptotic series (het_ratio_yule), the
//    star-like simplification (het_ratio_star), and the exact finite sum over
//    merge levels (pair_partition_prob_exact).
//  * Fixation-time moments: E[T] and E[T*] to O(1/alpha) accuracy
//    (expected_T / expected_Tstar), plus quadrature oracles built on the
//    diffusion Green functions (expected_T_quadrature, ...).
//  * The Green functions themselves: t(x;p) for the unconditioned frequency
//    diffusion, t*(x;p) for the diffusion conditioned to fix, t**(x;p) for
//    the time-reversed path, and the fixation probability P1(p) — all
//    evaluated by adaptive quadrature of
//        psi(y) = y^(-theta) exp(2 alpha (1-y))
//    integrals in numerically stable (exponent-shifted) form.
// =============================================================================
#pragma once

#include <functional>
#include <stdexcept>
#include <string>

#include "sweepsim/params.hpp"

namespace sweepsim {

/// Thrown when adaptive quadrature cannot reach the requested tolerance.
struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GreenFnContext {
  double alpha = 1000.0;
  double theta = 0.0;
  double abs_tol = 1e-12;  // per-integral absolute tolerance
  int max_depth = 50;      // adaptive subdivision depth limit
};

/// No-separating-mark probability between Yule levels i1 and i2:
/// exp(-(gamma/ln alpha) * sum_{i=i1+1}^{i2} 1/(i+theta)).  Requires i1 <= i2.
double p_between(int i1, int i2, double gamma, double theta, double alpha);

/// Heterozygosity ratio H_T/H_T0 from the Yule approximation series.
/// The asymptotic expression can leave [0,1] for extreme parameters; the
/// returned value is clamped with `clamped` set as a warning.
struct HetRatioResult {
  double value = 0.0;
  bool clamped = false;
};
HetRatioResult het_ratio_yule(double alpha, double theta, double gamma);

/// Star-like approximation: 1 - exp(-2*gamma)/(theta+1).
double het_ratio_star(double theta, double gamma);

/// Exact probability that two sampled lines are identical by descent through
/// the sweep, P[Upsilon = {{1,2}}]: finite sum over the merge level i of the
/// pair, with the level products kept in log space.
double pair_partition_prob_exact(double alpha, double theta, double gamma);

/// E[T] = (1/alpha)(2 ln(2 alpha) + 2 gamma_e + 1/theta
///                  - theta * sum_{n>=1} 1/(n(n+theta)))   [O(1/alpha) order]
/// The series is summed to series_terms plus an integral tail.
/// Throws ConfigError for theta = 0 (E[T] diverges).
double expected_T(double alpha, double theta, long series_terms = 1'000'000);

/// E[T*] = (2/alpha)(ln(2 alpha) + gamma_e), valid for 0 <= theta <= 1.
double expected_Tstar(double alpha);

enum class GreenKind {
  kUnconditioned,  // t(x;p)
  kConditioned,    // t*(x;p): diffusion conditioned to fix
  kReversed,       // t**(x;p): time-reversed diffusion
};

/// Green function value at interior x for the diffusion started at p.
double green_density(GreenKind kind, double x, double p,
                     const GreenFnContext& ctx);

/// Probability of absorption at 1 before 0 from frequency p; identically 1
/// for theta >= 1 (inaccessible boundary).
double fixation_prob(double p, const GreenFnContext& ctx);

/// Quadrature oracles: integral of t(x;0) (resp. t*(x;0)) over x in (0,1),
/// i.e. E[T] (resp. E[T*]) computed from the Green function directly.
double expected_T_quadrature(const GreenFnContext& ctx);
double expected_Tstar_quadrature(const GreenFnContext& ctx);

/// Bundled fixation-time moments.  variance_Tstar_bound is the O(1/alpha^2)
/// envelope kVarTstarConstant/alpha^2 used by the acceptance checks (the
/// theory gives only the order, not a constant).
inline constexpr double kVarTstarConstant = 10.0;
struct MomentReport {
  double expected_T = 0.0;       // NaN when theta = 0 (divergent)
  double expected_Tstar = 0.0;
  double variance_Tstar_bound = 0.0;
  std::string method;            // "series" | "quadrature"
};
MomentReport moment_report(double alpha, double theta,
                           bool use_quadrature = false);

/// Adaptive Simpson integration of f over [a,b]; exposed for reuse and tests.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, int max_depth);

}  // namespace sweepsim
