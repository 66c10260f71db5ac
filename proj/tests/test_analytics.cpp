#include <doctest.h>

#include <cmath>
#include <vector>

#include "sweepsim/analytics.hpp"

using namespace sweepsim;

namespace {
// The benchmark comparison grid used throughout: theta rows x rho columns at
// alpha = 1000, with gamma derived under the calibrated convention.
const double kGridThetas[] = {0.0, 0.1, 1.0};
const double kGridRhos[] = {2.0, 5.0, 10.0, 50.0};
constexpr double kGridAlpha = 1000.0;
}  // namespace

TEST_CASE("no-mark probability: boundary cases and frozen reference value") {
  CHECK(p_between(5, 5, 0.3, 0.5, 1000.0) == 1.0);
  CHECK(p_between(1, 2000, 0.0, 0.0, 1000.0) == 1.0);
  // Independently computed with 50-digit arithmetic.
  const double gamma = 10.0 * std::log(1000.0) / 1000.0;
  CHECK(p_between(1, 2000, gamma, 0.0, 1000.0) ==
        doctest::Approx(0.930732209063614).epsilon(1e-12));
  CHECK_THROWS(p_between(3, 2, 0.1, 0.0, 1000.0));
}

TEST_CASE("no-mark probability multiplies across adjacent level ranges") {
  const double gamma = 0.2, theta = 0.3, alpha = 1000.0;
  const int triples[][3] = {{1, 7, 2000}, {2, 500, 1500}, {10, 11, 12}};
  for (const auto& t : triples) {
    const double whole = p_between(t[0], t[2], gamma, theta, alpha);
    const double split = p_between(t[0], t[1], gamma, theta, alpha) *
                         p_between(t[1], t[2], gamma, theta, alpha);
    CHECK(whole == doctest::Approx(split).epsilon(1e-12));
  }
}

TEST_CASE("series heterozygosity ratio: zero recombination limit is "
          "theta/(theta+1)") {
  for (double theta : {0.0, 0.5, 1.0}) {
    const HetRatioResult r = het_ratio_yule(1000.0, theta, 0.0);
    CHECK(r.value == doctest::Approx(theta / (theta + 1.0)).epsilon(1e-9));
    CHECK_FALSE(r.clamped);
  }
}

TEST_CASE("series heterozygosity ratio increases with recombination and stays "
          "in [0,1] on the benchmark grid") {
  for (double theta : kGridThetas) {
    double prev = -1.0;
    for (double gamma : {0.0, 0.05, 0.1, 0.2, 0.4}) {
      const HetRatioResult r = het_ratio_yule(kGridAlpha, theta, gamma);
      CHECK(r.value >= 0.0);
      CHECK(r.value <= 1.0);
      CHECK(r.value > prev - 1e-12);
      prev = r.value;
    }
  }
}

TEST_CASE("star-like heterozygosity ratio closed form") {
  CHECK(het_ratio_star(0.0, 0.5 * std::log(2.0)) ==
        doctest::Approx(0.5).epsilon(1e-15));
  CHECK(het_ratio_star(1.0, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(het_ratio_star(0.5, 0.25) ==
        doctest::Approx(1.0 - std::exp(-0.5) / 1.5).epsilon(1e-15));
}

TEST_CASE("exact pair-identity sum: no recombination, single origin => "
          "identity is near-certain") {
  CHECK(pair_partition_prob_exact(1000.0, 0.0, 0.0) > 0.999);
  // One origin in expectation every (1+theta) draws.
  CHECK(1.0 - pair_partition_prob_exact(1000.0, 1.0, 0.0) ==
        doctest::Approx(0.5).epsilon(4e-3));
}

TEST_CASE("exact pair-identity sum agrees with the series formula across the "
          "benchmark grid") {
  for (double theta : kGridThetas) {
    for (double rho : kGridRhos) {
      const double gamma =
          gamma_from_rho(kGridAlpha, rho, GammaConvention::kCalibrated);
      const double exact = pair_partition_prob_exact(kGridAlpha, theta, gamma);
      const double series = het_ratio_yule(kGridAlpha, theta, gamma).value;
      CHECK(std::abs(1.0 - exact - series) < 0.005);
    }
  }
}

TEST_CASE("expected sweep duration: frozen high-precision values") {
  CHECK(expected_Tstar(1000.0) ==
        doctest::Approx(0.0163562362488872).epsilon(1e-12));
  CHECK(expected_Tstar(200.0) ==
        doctest::Approx(0.0656868021200951).epsilon(1e-12));
  CHECK(expected_Tstar(100.0) ==
        doctest::Approx(0.1175106606289914).epsilon(1e-12));
}

TEST_CASE("expected fixation time: frozen values and structural limits") {
  CHECK(expected_T(1000.0, 0.1) ==
        doctest::Approx(0.0262027755243968).epsilon(1e-10));
  CHECK(expected_T(200.0, 0.5) ==
        doctest::Approx(0.0726182739256946).epsilon(1e-10));
  // At theta = 1 the waiting-time and correction terms cancel exactly.
  CHECK(expected_T(1000.0, 1.0) ==
        doctest::Approx(expected_Tstar(1000.0)).epsilon(1e-9));
  // The origination wait dominates for small theta: E[T] - E[T*] ~ 1/(alpha*theta).
  const double gap = expected_T(1000.0, 0.01) - expected_Tstar(1000.0);
  CHECK(gap == doctest::Approx(0.1).epsilon(0.15));
  CHECK_THROWS_AS(expected_T(1000.0, 0.0), ConfigError);
}

TEST_CASE("fixation probability: closed form at theta = 0, monotonicity, and "
          "the inaccessible-boundary regime") {
  const GreenFnContext ctx{1000.0, 0.0};
  CHECK(fixation_prob(0.0, ctx) == 0.0);
  CHECK(fixation_prob(1.0, ctx) == 1.0);
  // Frozen: (1 - exp(-2*alpha*p)) / (1 - exp(-2*alpha)) at p = 1/(2*alpha).
  CHECK(fixation_prob(1.0 / 2000.0, ctx) ==
        doctest::Approx(0.632120558828558).epsilon(1e-8));
  for (int i = 1; i <= 20; ++i) {
    const double p = i / 21.0;
    const double closed =
        std::expm1(-2000.0 * p) / std::expm1(-2000.0);
    CHECK(fixation_prob(p, ctx) == doctest::Approx(closed).epsilon(1e-8));
  }
  double prev = 0.0;
  for (double p : {0.0001, 0.001, 0.01, 0.1, 0.5}) {
    const double v = fixation_prob(p, ctx);
    // Near-saturated values carry quadrature noise at the 1e-10 scale.
    CHECK(v >= prev - 1e-9);
    prev = v;
  }
  // More mutation pressure makes loss harder from the same start.
  double prev_theta = 0.0;
  for (double theta : {0.0, 0.2, 0.4, 0.8}) {
    const GreenFnContext c{1000.0, theta};
    const double v = fixation_prob(0.001, c);
    CHECK(v >= prev_theta - 1e-12);
    prev_theta = v;
  }
  CHECK(fixation_prob(0.3, GreenFnContext{1000.0, 1.0}) == 1.0);
  CHECK(fixation_prob(0.3, GreenFnContext{1000.0, 2.5}) == 1.0);
}

TEST_CASE("green functions are finite and positive on an interior grid") {
  for (double theta : {0.0, 0.5, 1.0, 2.0}) {
    const GreenFnContext ctx{200.0, theta};
    for (GreenKind kind : {GreenKind::kUnconditioned, GreenKind::kConditioned,
                           GreenKind::kReversed}) {
      for (double x : {0.001, 0.01, 0.3, 0.7, 0.99}) {
        for (double p : {0.0, 0.005, 0.4}) {
          if (kind == GreenKind::kReversed && p == 0.0 && theta >= 1.0) {
            // The reversed path cannot be launched from an inaccessible
            // boundary.
            CHECK_THROWS(green_density(kind, x, p, ctx));
            continue;
          }
          const double v = green_density(kind, x, p, ctx);
          CHECK(std::isfinite(v));
          CHECK(v >= 0.0);
        }
      }
    }
  }
}

TEST_CASE("conditioning is a no-op when loss is impossible") {
  const GreenFnContext ctx{200.0, 1.5};
  for (double x : {0.01, 0.2, 0.8}) {
    CHECK(green_density(GreenKind::kConditioned, x, 0.0, ctx) ==
          doctest::Approx(green_density(GreenKind::kUnconditioned, x, 0.0, ctx))
              .epsilon(1e-10));
  }
}

TEST_CASE("quadrature moments: frozen values and agreement with the series") {
  const GreenFnContext ctx{200.0, 0.5};
  // Independently computed with 50-digit arithmetic.
  CHECK(expected_T_quadrature(ctx) ==
        doctest::Approx(0.0725402384571447).epsilon(1e-7));
  // The closed form carries an O(log(alpha)/alpha^2) truncation error, so at
  // alpha = 200 the two agree only to ~1e-3 relative.
  CHECK(expected_T_quadrature(ctx) ==
        doctest::Approx(expected_T(200.0, 0.5)).epsilon(2e-3));

  const GreenFnContext ctx0{200.0, 0.0};
  CHECK(expected_Tstar_quadrature(ctx0) ==
        doctest::Approx(0.0656617393052277).epsilon(1e-6));
  CHECK(expected_Tstar_quadrature(ctx0) ==
        doctest::Approx(expected_Tstar(200.0)).epsilon(2e-3));

  // At larger alpha the truncation error shrinks below 1e-3 relative.
  const GreenFnContext big{1000.0, 0.5};
  CHECK(expected_T_quadrature(big) ==
        doctest::Approx(expected_T(1000.0, 0.5)).epsilon(1e-3));
}

TEST_CASE("moment report bundles the moments with the variance envelope") {
  const MomentReport r = moment_report(1000.0, 0.5);
  CHECK(r.expected_T == doctest::Approx(expected_T(1000.0, 0.5)));
  CHECK(r.expected_Tstar == doctest::Approx(expected_Tstar(1000.0)));
  CHECK(r.expected_T >= r.expected_Tstar);
  CHECK(r.variance_Tstar_bound ==
        doctest::Approx(kVarTstarConstant / 1e6).epsilon(1e-12));
  CHECK(r.method == "series");
  CHECK(std::isnan(moment_report(1000.0, 0.0).expected_T));
}

TEST_CASE("adaptive integrator handles smooth and endpoint-singular "
          "integrands") {
  const double cube = integrate([](double x) { return x * x; }, 0.0, 1.0,
                                1e-12, 40);
  CHECK(cube == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
  const double osc = integrate([](double x) { return std::sin(x); }, 0.0,
                               3.141592653589793, 1e-12, 40);
  CHECK(osc == doctest::Approx(2.0).epsilon(1e-10));
  CHECK_THROWS_AS(integrate([](double x) { return 1.0 / std::sqrt(x + 1e-300); },
                            0.0, 1.0, 1e-14, 4),
                  QuadratureError);
}
