#pragma once

// Distributional properties: moments, incomplete moments, probability
// weighted moments, MGF, stress-strength reliability, order statistics,
// Renyi and q-entropies, residual-life moments and the cumulative
// information generating function.
//
// Every quantity is an integral against the density.  The part of the
// range below the median is integrated in the probability scale
// (x = Q(u), dF = du), which removes the density's edge singularity when
// theta < 1; the part above the median is integrated in x with a
// semi-infinite substitution scaled to the distribution's spread.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>

#include "gtld/errors.hpp"
#include "gtld/model.hpp"
#include "gtld/numerics.hpp"
#include "gtld/subfamilies.hpp"

namespace gtld {

enum class MomentMethod { quadrature, series };

/// Integration window for density-power integrals.  Defaults to the full
/// support; a narrower window yields the truncated integral over
/// [lower, upper].
struct IntegrationWindow {
  std::optional<double> lower;
  std::optional<double> upper;
};

namespace detail {

inline QuadratureSpec property_quadrature() {
  QuadratureSpec q;
  q.abs_tol = 1e-13;
  q.rel_tol = 1e-10;
  return q;
}

inline double upper_scale(const GtldModel& m) {
  const double s = m.quantile(0.75) - m.quantile(0.5);
  return s > 0.0 ? s : 1.0;
}

/// Throws divergence_error unless x * h(x) decays in the upper tail.
/// Checked on x0 * 2^k, x0 = Q(1 - 1e-6), through the local log-slope.
inline void probe_tail(const GtldModel& m, const std::function<double(double)>& h, const std::string& what,
                       double from = -kInf) {
  double x = std::max(m.quantile_upper(1e-6), from);
  if (x <= 0.0) x = std::max(1.0, from + 1.0);
  double prev = std::fabs(x * h(x));
  for (int k = 0; k < 4; ++k) {
    const double x2 = 2.0 * x;
    const double cur = std::fabs(x2 * h(x2));
    if (cur == 0.0) return;
    if (!std::isfinite(cur) || !(prev > 0.0))
      throw divergence_error(what + ": integrand does not decay in the upper tail");
    const double slope = std::log(cur / prev) / std::log(2.0);
    if (slope > -1e-3) throw divergence_error(what + ": integrand does not decay in the upper tail");
    prev = cur;
    x = x2;
  }
}

/// lim beta G(x)/x as x -> inf is compared with t; e^{tx} f(x) is
/// integrable only if the exponent beta G(x) - t x grows without bound.
inline void probe_exponential_tail(const GtldModel& m, double t) {
  if (t <= 0.0) return;
  const double base = std::max(1.0, m.quantile(0.5));
  const double beta = m.params().beta;
  const auto& g = m.transform().eval;
  const double x1 = m.support_low() + 1e6 * base, x2 = m.support_low() + 1e12 * base;
  const double g2 = g(x2);
  if (std::isinf(g2)) return;
  const double r1 = beta * g(x1) / x1, r2 = beta * g2 / x2;
  if (r2 > t * (1.0 + 1e-9) && r2 >= 0.999 * r1) return;
  throw divergence_error("mgf: e^{tx} f(x) is not integrable for this t");
}

}  // namespace detail

/// int_a^b h(x) f(x) dx for support_low <= a <= b <= inf.
inline double integrate_density(const GtldModel& m, const std::function<double(double)>& h, double a, double b,
                                const QuadratureSpec& spec = detail::property_quadrature()) {
  const double low = m.support_low();
  if (std::isnan(a) || a < low) a = low;
  if (b <= a) return 0.0;
  const double median = m.quantile(0.5);
  double total = 0.0;
  if (a < median) {
    const double top = std::min(b, median);
    const double ua = a == low ? 0.0 : m.cdf(a);
    const double ub = top == median ? 0.5 : m.cdf(top);
    auto g = [&](double u) { return u <= 0.0 || u >= 1.0 ? 0.0 : h(m.quantile(u)); };
    total += integrate(g, ua, ub, spec);
  }
  if (b > median) {
    const double start = std::max(a, median);
    auto g = [&](double x) {
      const double fx = m.pdf(x);
      return fx == 0.0 ? 0.0 : h(x) * fx;
    };
    total += integrate(g, start, b, spec, detail::upper_scale(m));
  }
  return total;
}

// ---------------------------------------------------------------------------
// Moments

/// E[X^r] by the closed series for GTW:
///   sum_i (-1)^i [(1+l) C(th-1,i) - 2 l C(2th-1,i)] th Gamma(r/a+1) / (b^{r/a} (i+1)^{r/a+1})
inline double gtw_moment_series(const ParamVector& p, int r, const SeriesSpec& series = {}) {
  validate(p);
  if (p.shape.size() != 1) throw domain_error("gtw_moment_series: GTW takes one shape parameter");
  const double a = p.shape[0], b = p.beta, th = p.theta, l = p.lambda;
  const double s = r / a + 1.0;
  const double scale = th * gamma_fn(s) / std::pow(b, r / a);
  double c1 = 1.0, c2 = 1.0;  // C(th-1,i), C(2th-1,i)
  auto term = [&, sign = 1.0](long i) mutable {
    if (i > 0) {
      c1 *= (th - 1.0 - (i - 1)) / i;
      c2 *= (2.0 * th - 1.0 - (i - 1)) / i;
      sign = -sign;
    }
    return sign * ((1.0 + l) * c1 - 2.0 * l * c2) * scale / std::pow(i + 1.0, s);
  };
  return sum_series(term, series).value;
}

/// int_0^z x^r f(x) dx for GTW through lower incomplete gamma terms.
inline double gtw_incomplete_moment_series(const ParamVector& p, int r, double z, const SeriesSpec& series = {}) {
  validate(p);
  if (p.shape.size() != 1) throw domain_error("gtw_incomplete_moment_series: GTW takes one shape parameter");
  if (!(z >= 0.0)) throw domain_error("gtw_incomplete_moment_series: z must be non-negative");
  const double a = p.shape[0], b = p.beta, th = p.theta, l = p.lambda;
  const double s = r / a + 1.0;
  const double scale = th / std::pow(b, r / a);
  const double bza = b * std::pow(z, a);
  double c1 = 1.0, c2 = 1.0;
  auto term = [&, sign = 1.0](long i) mutable {
    if (i > 0) {
      c1 *= (th - 1.0 - (i - 1)) / i;
      c2 *= (2.0 * th - 1.0 - (i - 1)) / i;
      sign = -sign;
    }
    const double k = i + 1.0;
    return sign * ((1.0 + l) * c1 - 2.0 * l * c2) * scale * lower_incomplete_gamma(s, k * bza) / std::pow(k, s);
  };
  return sum_series(term, series).value;
}

/// E[X^r].  The series method is available for GTW models only (pass the
/// family so it can be checked).
inline double raw_moment(const GtldModel& m, int r, MomentMethod method = MomentMethod::quadrature,
                         std::optional<SubfamilyId> family = std::nullopt) {
  if (r < 1) throw domain_error("raw_moment: order must be >= 1");
  auto h = [r](double x) { return std::pow(x, r); };
  detail::probe_tail(m, [&](double x) { return h(x) * m.pdf(x); }, "raw_moment");
  if (method == MomentMethod::series) {
    if (family != SubfamilyId::GTW) throw domain_error("raw_moment: series form implemented for GTW only");
    return gtw_moment_series(m.params(), r);
  }
  return integrate_density(m, h, m.support_low(), kInf);
}

/// int_{support_low}^z x^r f(x) dx
inline double incomplete_moment(const GtldModel& m, int r, double z, MomentMethod method = MomentMethod::quadrature,
                                std::optional<SubfamilyId> family = std::nullopt) {
  if (r < 1) throw domain_error("incomplete_moment: order must be >= 1");
  if (std::isnan(z) || z < m.support_low()) throw domain_error("incomplete_moment: z below the support");
  auto h = [r](double x) { return std::pow(x, r); };
  if (std::isinf(z)) return raw_moment(m, r, method, family);
  if (method == MomentMethod::series) {
    if (family != SubfamilyId::GTW) throw domain_error("incomplete_moment: series form implemented for GTW only");
    return gtw_incomplete_moment_series(m.params(), r, z);
  }
  return integrate_density(m, h, m.support_low(), z);
}

/// E[X^r F(X)^s]
inline double pwm(const GtldModel& m, int r, int s) {
  if (r < 0 || s < 0) throw domain_error("pwm: orders must be non-negative");
  auto h = [&](double x) { return std::pow(x, r) * std::pow(m.cdf(x), s); };
  if (r > 0) detail::probe_tail(m, [&](double x) { return h(x) * m.pdf(x); }, "pwm");
  return integrate_density(m, h, m.support_low(), kInf);
}

/// E[e^{tX}]
inline double mgf(const GtldModel& m, double t) {
  if (t == 0.0) return 1.0;
  detail::probe_exponential_tail(m, t);
  auto h = [t](double x) { return std::exp(t * x); };
  detail::probe_tail(m, [&](double x) { return h(x) * m.pdf(x); }, "mgf");
  return integrate_density(m, h, m.support_low(), kInf);
}

/// P(X1 > X2) for X1 ~ GTLD(psi, beta, theta, lambda1) independent of
/// X2 ~ GTLD(psi, beta, theta, lambda2).
inline double stress_strength(double lambda1, double lambda2) {
  if (!(std::fabs(lambda1) <= 1.0) || !(std::fabs(lambda2) <= 1.0))
    throw domain_error("stress_strength: lambdas must lie in [-1, 1]");
  return (lambda2 - lambda1 + 3.0) / 6.0;
}

/// Density of the r-th of n order statistics.
inline double order_stat_pdf(const GtldModel& m, int n, int r, double x) {
  if (n < 1 || r < 1 || r > n) throw domain_error("order_stat_pdf: need 1 <= r <= n");
  const double f = m.pdf(x);
  if (f == 0.0) return 0.0;
  const double F = m.cdf(x), S = m.survival(x);
  const double log_b = log_beta(r, n - r + 1.0);
  return f * std::exp((r - 1) * std::log(F) + (n - r) * std::log(S) - log_b);
}

// ---------------------------------------------------------------------------
// Entropies

/// int f(x)^order dx over the window (full support by default).
inline double density_power_integral(const GtldModel& m, double order, const IntegrationWindow& window = {}) {
  if (!(order > 0.0)) throw domain_error("density_power_integral: order must be positive");
  const double low = m.support_low();
  const double a = window.lower.value_or(low);
  const double b = window.upper.value_or(kInf);
  if (a < low) throw domain_error("density_power_integral: window starts below the support");
  if (!(b > a)) throw domain_error("density_power_integral: empty window");
  if (a == low && order * m.edge_exponent() <= -1.0)
    throw divergence_error("density_power_integral: f^" + std::to_string(order) +
                           " is not integrable at the support edge (density ~ x^" +
                           std::to_string(m.edge_exponent()) + ")");
  auto h = [&](double x) { return std::pow(m.pdf(x), order - 1.0); };
  if (std::isinf(b)) detail::probe_tail(m, [&](double x) { return std::pow(m.pdf(x), order); }, "density_power_integral", a);
  return integrate_density(m, h, a, b);
}

/// Renyi entropy (1/(1-rho)) log int f^rho.
inline double renyi_entropy(const GtldModel& m, double rho, const IntegrationWindow& window = {}) {
  if (!(rho > 0.0) || rho == 1.0) throw domain_error("renyi_entropy: rho must be positive and != 1");
  return std::log(density_power_integral(m, rho, window)) / (1.0 - rho);
}

/// q-entropy (1/(q-1)) log(1 - int f^q).
inline double q_entropy(const GtldModel& m, double q, const IntegrationWindow& window = {}) {
  if (!(q > 0.0) || q == 1.0) throw domain_error("q_entropy: q must be positive and != 1");
  const double inner = density_power_integral(m, q, window);
  if (inner >= 1.0)
    throw domain_error("q_entropy: int f^q = " + std::to_string(inner) + " >= 1, logarithm undefined");
  return std::log1p(-inner) / (q - 1.0);
}

// ---------------------------------------------------------------------------
// Residual life

/// E[(X - t)^n | X > t]; n = 1 gives the mean residual life.
inline double residual_moment(const GtldModel& m, int n, double t) {
  if (n < 0) throw domain_error("residual_moment: n must be non-negative");
  if (std::isnan(t) || t < m.support_low()) throw domain_error("residual_moment: t below the support");
  const double s = m.survival(t);
  if (!(s > 0.0)) throw domain_error("residual_moment: survival at t is zero");
  if (n == 0) return 1.0;
  auto h = [n, t](double x) { return std::pow(x - t, n); };
  detail::probe_tail(m, [&](double x) { return h(x) * m.pdf(x); }, "residual_moment", t);
  return integrate_density(m, h, t, kInf) / s;
}

/// E[(t - X)^n | X <= t]; n = 1 gives the mean waiting time.
inline double reversed_residual_moment(const GtldModel& m, int n, double t) {
  if (n < 0) throw domain_error("reversed_residual_moment: n must be non-negative");
  if (std::isnan(t) || t < m.support_low()) throw domain_error("reversed_residual_moment: t below the support");
  const double F = m.cdf(t);
  if (!(F > 0.0)) throw domain_error("reversed_residual_moment: F(t) is zero");
  if (n == 0) return 1.0;
  auto h = [n, t](double x) { return std::pow(t - x, n); };
  return integrate_density(m, h, m.support_low(), t) / F;
}

// ---------------------------------------------------------------------------
// Cumulative information generating function

/// G(m, n) = int F^m S^n dx over the support.  With n = 0 the integrand
/// tends to 1 and the integral diverges on an unbounded support.
inline double cigf(const GtldModel& model, double m, double n,
                   const QuadratureSpec& spec = detail::property_quadrature()) {
  if (!(m >= 0.0) || !(n >= 0.0)) throw domain_error("cigf: m and n must be non-negative");
  if (n == 0.0) throw divergence_error("cigf: F^m is not integrable on an unbounded support (n = 0)");
  auto g = [&](double x) {
    const double S = model.survival(x);
    if (S == 0.0) return 0.0;
    const double Fm = m == 0.0 ? 1.0 : std::pow(model.cdf(x), m);
    return Fm * std::pow(S, n);
  };
  detail::probe_tail(model, g, "cigf");
  const double low = model.support_low();
  const double median = model.quantile(0.5);
  return integrate(g, low, median, spec) + integrate(g, median, kInf, spec, detail::upper_scale(model));
}

/// Cumulative residual information generating measure K(n) = G(0, n).
inline double crigm(const GtldModel& model, double n) { return cigf(model, 0.0, n); }

/// Cumulative information generating measure H(m) = G(m, 0).
inline double cigm(const GtldModel& model, double m) { return cigf(model, m, 0.0); }

}  // namespace gtld
