#include "sweepsim/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sweepsim {
namespace {

// Recursive adaptive Simpson step with the classic 15x error estimate.
double simpson_step(const std::function<double(double)>& f, double a, double b,
                    double fa, double fm, double fb, double whole, double tol,
                    int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
  if (depth <= 0) {
    throw QuadratureError("adaptive quadrature did not converge");
  }
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

// psi-integral building blocks, all exponent-shifted so that every integrand
// is bounded by 1-ish:
//
//   I0(x)  = int_0^x y^(-theta) e^(-2 alpha y) dy          (theta < 1)
//   Dref(a)= int_a^1 y^(-theta) e^(-2 alpha (y-a)) dy      (a > 0, any theta)
//   D(x,a) = int_a^1 (x/y)^theta e^(-2 alpha (y-x)) dy     (a >= x > 0)
//
// These give every psi-ratio used by the Green functions without over/underflow.
double integral_I0(double x, const GreenFnContext& ctx) {
  const double theta = ctx.theta;
  if (theta >= 1.0) {
    throw std::invalid_argument("integral_I0 diverges for theta >= 1");
  }
  if (x <= 0.0) return 0.0;
  // Substitution z = y^(1-theta) removes the endpoint singularity.
  const double pw = 1.0 / (1.0 - theta);
  auto f = [&](double z) { return std::exp(-2.0 * ctx.alpha * std::pow(z, pw)); };
  return pw * integrate(f, 0.0, std::pow(x, 1.0 - theta), ctx.abs_tol,
                        ctx.max_depth);
}

double integral_Dref(double a, const GreenFnContext& ctx) {
  if (a == 0.0) return integral_I0(1.0, ctx);
  auto f = [&](double y) {
    return std::pow(y, -ctx.theta) * std::exp(-2.0 * ctx.alpha * (y - a));
  };
  return integrate(f, a, 1.0, ctx.abs_tol, ctx.max_depth);
}

double integral_D(double x, double a, const GreenFnContext& ctx) {
  auto f = [&](double y) {
    return std::pow(x / y, ctx.theta) * std::exp(-2.0 * ctx.alpha * (y - x));
  };
  return integrate(f, a, 1.0, ctx.abs_tol, ctx.max_depth);
}

double p1_raw(double p, const GreenFnContext& ctx) {
  if (ctx.theta >= 1.0) return 1.0;
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  return integral_I0(p, ctx) / integral_I0(1.0, ctx);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, int max_depth) {
  if (!(b > a)) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, b, fa, fm, fb, whole, abs_tol, max_depth);
}

double p_between(int i1, int i2, double gamma, double theta, double alpha) {
  if (i1 < 1 || i1 > i2)
    throw std::invalid_argument("p_between: need 1 <= i1 <= i2");
  double sum = 0.0;
  for (int i = i1 + 1; i <= i2; ++i) sum += 1.0 / (i + theta);
  return std::exp(-gamma / std::log(alpha) * sum);
}

HetRatioResult het_ratio_yule(double alpha, double theta, double gamma) {
  if (!(alpha > 1.0) || !(theta >= 0.0) || !(gamma >= 0.0))
    throw ConfigError("het_ratio_yule: invalid parameters");
  const int L = static_cast<int>(std::floor(2.0 * alpha));
  const double c = gamma / std::log(alpha);

  // Walk levels downward keeping log p_i = -c * sum_{j=i+1}^{L} 1/(j+theta).
  double log_p = 0.0;
  double series = 0.0;
  for (int i = L; i >= 2; --i) {
    if (i < L) log_p -= c / (i + 1 + theta);
    series += (2.0 * i + theta) / ((i + theta) * (i + theta) * (i + 1 + theta)) *
              std::exp(2.0 * log_p);
  }
  log_p -= c / (1 + 1 + theta);  // down to p_1
  const double p1_sq = std::exp(2.0 * log_p);

  HetRatioResult res;
  res.value = 1.0 - p1_sq / (theta + 1.0) - 2.0 * c * series;
  if (res.value < 0.0 || res.value > 1.0) {
    res.value = std::clamp(res.value, 0.0, 1.0);
    res.clamped = true;
  }
  return res;
}

double het_ratio_star(double theta, double gamma) {
  if (!(theta >= 0.0) || !(gamma >= 0.0))
    throw ConfigError("het_ratio_star: invalid parameters");
  return 1.0 - std::exp(-2.0 * gamma) / (theta + 1.0);
}

double pair_partition_prob_exact(double alpha, double theta, double gamma) {
  if (!(alpha > 1.0) || !(theta >= 0.0) || !(gamma >= 0.0))
    throw ConfigError("pair_partition_prob_exact: invalid parameters");
  const int L = static_cast<int>(std::floor(2.0 * alpha));
  const double c = gamma / std::log(alpha);

  // Term i: the pair merges at level i (prob 2/((i+theta)(i+1)) times the
  // probability of staying unsplit above, the log-product) and neither leaf
  // branch carries a mark (p_i^2).
  double log_p = 0.0;      // log p_i for the current i (p_L = 1)
  double log_prod = 0.0;   // log prod_{j=i+1}^{L} (j-1)(j+2+theta)/((j+theta)(j+1))
  double total = 0.0;
  for (int i = L; i >= 1; --i) {
    if (i < L) {
      const int j = i + 1;
      log_p -= c / (j + theta);
      log_prod += std::log((j - 1.0) * (j + 2.0 + theta)) -
                  std::log((j + theta) * (j + 1.0));
    }
    total += 2.0 / ((i + theta) * (i + 1.0)) * std::exp(2.0 * log_p + log_prod);
  }
  return total;
}

double expected_T(double alpha, double theta, long series_terms) {
  if (!(alpha > 0.0)) throw ConfigError("expected_T: alpha must be > 0");
  if (!(theta > 0.0))
    throw ConfigError("expected_T: diverges for theta = 0 "
                      "(infinite expected waiting time for the first successful mutant)");
  if (series_terms < 1) throw ConfigError("expected_T: series_terms >= 1");
  double series = 0.0;
  for (long n = series_terms; n >= 1; --n) series += 1.0 / (n * (n + theta));
  // Midpoint integral tail: sum_{n>M} 1/(n(n+theta)) ~ (1/theta) ln(1 + theta/(M+1/2)).
  const double m = series_terms + 0.5;
  series += std::log1p(theta / m) / theta;
  return (2.0 * std::log(2.0 * alpha) + 2.0 * kEulerGamma + 1.0 / theta -
          theta * series) /
         alpha;
}

double expected_Tstar(double alpha) {
  if (!(alpha > 0.0)) throw ConfigError("expected_Tstar: alpha must be > 0");
  return 2.0 / alpha * (std::log(2.0 * alpha) + kEulerGamma);
}

double green_density(GreenKind kind, double x, double p,
                     const GreenFnContext& ctx) {
  if (!(x > 0.0 && x < 1.0))
    throw std::invalid_argument("green_density: x must be interior to (0,1)");
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("green_density: p must lie in [0,1]");
  const double theta = ctx.theta;
  const double pre = 2.0 / (x * (1.0 - x));

  switch (kind) {
    case GreenKind::kUnconditioned:
      return pre * integral_D(x, std::max(x, p), ctx);

    case GreenKind::kConditioned: {
      if (p <= x) {
        return p1_raw(x, ctx) * pre * integral_D(x, x, ctx);
      }
      // x <= p branch (Ewens 4.49): three stable ratio factors.
      double ratio = 1.0;  // int_0^x psi / int_0^p psi
      double p1x = 1.0;
      if (theta < 1.0) {
        const double i0x = integral_I0(x, ctx);
        ratio = i0x / integral_I0(p, ctx);
        p1x = i0x / integral_I0(1.0, ctx);
      }
      return pre * integral_D(x, p, ctx) * ratio * p1x;
    }

    case GreenKind::kReversed: {
      const double d_xx = integral_D(x, x, ctx);
      if (x <= p) return pre * d_xx * p1_raw(x, ctx);
      // p <= x branch (Ewens 4.52); int_x^1 psi / int_p^1 psi is carried as
      // x^(-theta) e^(-2 alpha (x-p)) D(x,x) / Dref(p).
      if (theta >= 1.0 && p == 0.0) {
        throw std::invalid_argument(
            "green_density(t**): p = 0 requires theta < 1");
      }
      const double p1p = theta >= 1.0 ? 1.0 : p1_raw(p, ctx);
      const double tail_ratio = std::pow(x, -theta) *
                                std::exp(-2.0 * ctx.alpha * (x - p)) * d_xx /
                                integral_Dref(p, ctx);
      return pre * d_xx * p1p * tail_ratio;
    }
  }
  throw std::logic_error("green_density: unknown kind");
}

double fixation_prob(double p, const GreenFnContext& ctx) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("fixation_prob: p must lie in [0,1]");
  return p1_raw(p, ctx);
}

double expected_T_quadrature(const GreenFnContext& ctx) {
  const double alpha = ctx.alpha;
  const double theta = ctx.theta;
  if (!(theta > 0.0))
    throw ConfigError("expected_T_quadrature: theta must be > 0");

  // Split 1/(x(1-x)) = 1/x + 1/(1-x).  The 1/x part collapses to a 1-D
  // integral after substituting x = v*y; the remaining v^(theta-1) endpoint
  // is removed by v = z^(1/theta).
  auto g = [&](double v) {
    const double one_minus = 1.0 - v;
    if (one_minus < 1e-12) return 2.0 * alpha;
    return -std::expm1(-2.0 * alpha * one_minus) / one_minus;
  };
  double part_x;
  if (theta < 1.0) {
    const double pw = 1.0 / theta;
    part_x = integrate([&](double z) { return g(std::pow(z, pw)); }, 0.0, 1.0,
                       ctx.abs_tol, ctx.max_depth) /
             (alpha * theta);
  } else {
    part_x = integrate([&](double v) { return std::pow(v, theta - 1.0) * g(v); },
                       0.0, 1.0, ctx.abs_tol, ctx.max_depth) /
             alpha;
  }

  // The 1/(1-x) part stays 2-D: outer x, inner the stable D(x,x) integral.
  auto h = [&](double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;  // D(x,x)/(1-x) -> 1 as x -> 1
    return integral_D(x, x, ctx) / (1.0 - x);
  };
  const double part_1mx =
      2.0 * integrate(h, 0.0, 1.0, 100.0 * ctx.abs_tol, ctx.max_depth);
  return part_x + part_1mx;
}

double expected_Tstar_quadrature(const GreenFnContext& ctx) {
  if (ctx.theta >= 1.0) return expected_T_quadrature(ctx);
  const double eps = 1e-9;  // integrand is bounded; endpoints are 0/0 forms
  auto f = [&](double x) {
    return p1_raw(x, ctx) * 2.0 / (x * (1.0 - x)) * integral_D(x, x, ctx);
  };
  return integrate(f, eps, 1.0 - eps, 100.0 * ctx.abs_tol, ctx.max_depth);
}

MomentReport moment_report(double alpha, double theta, bool use_quadrature) {
  MomentReport rep;
  rep.variance_Tstar_bound = kVarTstarConstant / (alpha * alpha);
  if (use_quadrature) {
    rep.method = "quadrature";
    GreenFnContext ctx{alpha, theta};
    rep.expected_Tstar = expected_Tstar_quadrature(ctx);
    rep.expected_T = theta > 0.0 ? expected_T_quadrature(ctx)
                                 : std::numeric_limits<double>::quiet_NaN();
  } else {
    rep.method = "series";
    rep.expected_Tstar = expected_Tstar(alpha);
    rep.expected_T = theta > 0.0 ? expected_T(alpha, theta)
                                 : std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

}  // namespace sweepsim
