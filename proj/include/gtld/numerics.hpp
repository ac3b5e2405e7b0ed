#pragma once

// Special functions, adaptive quadrature and series summation shared by the
// rest of the library.  Everything here is a pure function.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "gtld/errors.hpp"

namespace gtld {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_subdivisions = 4000;
};

struct SeriesSpec {
  double tail_tol = 1e-14;
  long max_terms = 1000000;
};

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;
  int subdivisions = 0;
  bool converged = false;
};

struct SeriesResult {
  double value = 0.0;
  long terms = 0;
};

// ---------------------------------------------------------------------------
// Gamma family

inline bool is_nonpositive_integer(double x) {
  return x <= 0.0 && std::floor(x) == x;
}

/// Gamma function; throws at the poles 0, -1, -2, ...
inline double gamma_fn(double x) {
  if (std::isnan(x)) throw domain_error("gamma_fn: NaN argument");
  if (is_nonpositive_integer(x)) throw domain_error("gamma_fn: pole at non-positive integer");
  return std::tgamma(x);
}

/// log|Gamma(x)| for x > 0.  Avoids lgamma's global signgam below the
/// overflow threshold of tgamma.
inline double log_gamma(double x) {
  if (!(x > 0.0)) throw domain_error("log_gamma: argument must be positive");
  if (x < 170.0) return std::log(std::tgamma(x));
  return std::lgamma(x);
}

inline double log_beta(double a, double b) {
  return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

namespace detail {

// P(s,x) by its power series, valid for x < s + 1.
inline double gamma_p_series(double s, double x) {
  double term = 1.0 / s;
  double sum = term;
  for (int n = 1; n < 10000; ++n) {
    term *= x / (s + n);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-17) break;
  }
  return sum * std::exp(-x + s * std::log(x) - log_gamma(s));
}

// Q(s,x) by the modified Lentz continued fraction, valid for x >= s + 1.
inline double gamma_q_fraction(double s, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - s;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x + s * std::log(x) - log_gamma(s)) * h;
}

inline void check_incomplete_gamma_args(double s, double x, const char* who) {
  if (!(s > 0.0)) throw domain_error(std::string(who) + ": s must be positive");
  if (!(x >= 0.0)) throw domain_error(std::string(who) + ": x must be non-negative");
}

}  // namespace detail

/// Regularized lower incomplete gamma P(s,x) = gamma(s,x)/Gamma(s).
inline double gamma_p(double s, double x) {
  detail::check_incomplete_gamma_args(s, x, "gamma_p");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < s + 1.0) return detail::gamma_p_series(s, x);
  return 1.0 - detail::gamma_q_fraction(s, x);
}

/// Regularized upper incomplete gamma Q(s,x) = Gamma(s,x)/Gamma(s).
inline double gamma_q(double s, double x) {
  detail::check_incomplete_gamma_args(s, x, "gamma_q");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < s + 1.0) return 1.0 - detail::gamma_p_series(s, x);
  return detail::gamma_q_fraction(s, x);
}

/// gamma(s,x) = int_0^x t^{s-1} e^{-t} dt
inline double lower_incomplete_gamma(double s, double x) {
  return gamma_p(s, x) * gamma_fn(s);
}

/// Gamma(s,x) = int_x^inf t^{s-1} e^{-t} dt
inline double upper_incomplete_gamma(double s, double x) {
  return gamma_q(s, x) * gamma_fn(s);
}

/// Generalized binomial coefficient C(a,k) by the product recurrence, so
/// non-integer a never touches a Gamma pole.
inline double gen_binom(double a, long k) {
  if (k < 0) throw domain_error("gen_binom: k must be non-negative");
  double c = 1.0;
  for (long j = 1; j <= k; ++j) {
    c *= (a - static_cast<double>(j) + 1.0) / static_cast<double>(j);
    if (c == 0.0) break;
  }
  return c;
}

// ---------------------------------------------------------------------------
// Adaptive Gauss-Kronrod quadrature

namespace detail {

// 21-point Kronrod rule and its embedded 10-point Gauss rule (QUADPACK qk21).
inline constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
inline constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208064170219, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gauss_kronrod21(const F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kWgk[10];
  double gauss = 0.0;
  double resabs = std::fabs(kronrod);
  std::array<double, 10> f1{}, f2{};
  for (int j = 0; j < 10; ++j) {
    const double dx = half * kXgk[j];
    f1[j] = f(center - dx);
    f2[j] = f(center + dx);
    const double pair = f1[j] + f2[j];
    kronrod += kWgk[j] * pair;
    resabs += kWgk[j] * (std::fabs(f1[j]) + std::fabs(f2[j]));
    if (j % 2 == 1) gauss += kWg[j / 2] * pair;
  }
  const double mean = 0.5 * kronrod;
  double resasc = kWgk[10] * std::fabs(fc - mean);
  for (int j = 0; j < 10; ++j) resasc += kWgk[j] * (std::fabs(f1[j] - mean) + std::fabs(f2[j] - mean));

  const double value = kronrod * half;
  resabs *= std::fabs(half);
  resasc *= std::fabs(half);
  double err = std::fabs((kronrod - gauss) * half);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double round = 50.0 * std::numeric_limits<double>::epsilon() * resabs;
  if (resabs > std::numeric_limits<double>::min() / (50.0 * std::numeric_limits<double>::epsilon()))
    err = std::max(err, round);
  if (!std::isfinite(value)) err = kInf;
  return {a, b, value, err};
}

template <class F>
QuadratureResult adaptive_finite(const F& f, double a, double b, const QuadratureSpec& spec) {
  std::priority_queue<Segment> heap;
  Segment first = gauss_kronrod21(f, a, b);
  double total = first.value;
  double total_err = first.error;
  heap.push(first);
  int subdivisions = 0;
  double frozen_err = 0.0;  // error carried by segments too narrow to split
  while (true) {
    const double target = std::max(spec.abs_tol, spec.rel_tol * std::fabs(total));
    if (total_err <= target) return {total, total_err, subdivisions, true};
    if (heap.empty() || subdivisions >= spec.max_subdivisions) break;
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      frozen_err += worst.error;
      continue;
    }
    Segment left = gauss_kronrod21(f, worst.a, mid);
    Segment right = gauss_kronrod21(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++subdivisions;
  }
  // Re-sum from the pieces to shed accumulated update round-off.
  double sum = 0.0, err = frozen_err;
  while (!heap.empty()) {
    sum += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  const bool ok = err <= std::max(spec.abs_tol, spec.rel_tol * std::fabs(sum));
  return {sum, err, subdivisions, ok};
}

}  // namespace detail

/// Adaptive integral of f over [lower, upper].  Either bound may be
/// infinite; a semi-infinite range [a, inf) is mapped onto [0, 1) through
/// x = a + scale * t / (1 - t), and (-inf, b] symmetrically.  `scale` should
/// be of the order of the integrand's width.  Never throws on
/// non-convergence; inspect `converged`.
template <class F>
QuadratureResult integrate_detailed(const F& f, double lower, double upper,
                                    const QuadratureSpec& spec = {}, double scale = 1.0) {
  if (!(spec.abs_tol > 0.0) || !(spec.rel_tol > 0.0) || spec.max_subdivisions < 1)
    throw domain_error("integrate: QuadratureSpec needs positive tolerances and max_subdivisions >= 1");
  if (std::isnan(lower) || std::isnan(upper)) throw domain_error("integrate: NaN bound");
  if (lower == upper) return {0.0, 0.0, 0, true};
  if (lower > upper) {
    QuadratureResult r = integrate_detailed(f, upper, lower, spec, scale);
    r.value = -r.value;
    return r;
  }
  if (!(scale > 0.0)) scale = 1.0;
  const bool lo_inf = std::isinf(lower);
  const bool hi_inf = std::isinf(upper);
  if (lo_inf && hi_inf) {
    QuadratureSpec half = spec;
    half.abs_tol *= 0.5;
    const QuadratureResult l = integrate_detailed(f, -kInf, 0.0, half, scale);
    const QuadratureResult r = integrate_detailed(f, 0.0, kInf, half, scale);
    return {l.value + r.value, l.abs_error + r.abs_error, l.subdivisions + r.subdivisions,
            l.converged && r.converged};
  }
  // Semi-infinite ranges use x = a + scale (1 - t)/t on t in (0, 1], which
  // puts infinity at t = 0 where doubles are dense; slowly decaying power
  // tails then stay resolvable.
  if (hi_inf) {
    auto g = [&](double t) {
      const double x = lower + scale * (1.0 - t) / t;
      if (std::isinf(x)) return 0.0;
      return f(x) * scale / (t * t);
    };
    return detail::adaptive_finite(g, 0.0, 1.0, spec);
  }
  if (lo_inf) {
    auto g = [&](double t) {
      const double x = upper - scale * (1.0 - t) / t;
      if (std::isinf(x)) return 0.0;
      return f(x) * scale / (t * t);
    };
    return detail::adaptive_finite(g, 0.0, 1.0, spec);
  }
  return detail::adaptive_finite(f, lower, upper, spec);
}

/// As integrate_detailed, but throws convergence_error (carrying the best
/// estimate and its error bound) when the tolerance was not met.
template <class F>
double integrate(const F& f, double lower, double upper, const QuadratureSpec& spec = {},
                 double scale = 1.0) {
  const QuadratureResult r = integrate_detailed(f, lower, upper, spec, scale);
  if (!r.converged)
    throw convergence_error("integrate: tolerance not reached (estimate " + std::to_string(r.value) +
                                ", error bound " + std::to_string(r.abs_error) + ")",
                            r.value, r.abs_error);
  return r.value;
}

// ---------------------------------------------------------------------------
// Series

/// Sums term(0) + term(1) + ... until three consecutive terms fall below
/// tail_tol in magnitude.  Neumaier-compensated.  Terms are requested in
/// increasing k, so `term` may carry recurrence state.
template <class Term>
SeriesResult sum_series(Term&& term, const SeriesSpec& spec = {}) {
  if (!(spec.tail_tol > 0.0) || spec.max_terms < 1)
    throw domain_error("sum_series: SeriesSpec needs tail_tol > 0 and max_terms >= 1");
  double sum = 0.0, comp = 0.0;
  int quiet = 0;
  for (long k = 0; k < spec.max_terms; ++k) {
    const double t = term(k);
    if (!std::isfinite(t)) throw divergence_error("sum_series: non-finite term at k=" + std::to_string(k));
    const double s = sum + t;
    comp += std::fabs(sum) >= std::fabs(t) ? (sum - s) + t : (t - s) + sum;
    sum = s;
    quiet = std::fabs(t) < spec.tail_tol ? quiet + 1 : 0;
    if (quiet == 3) return {sum + comp, k + 1};
  }
  throw convergence_error("sum_series: max_terms reached with tail above tolerance", sum + comp,
                          spec.tail_tol);
}

/// Pairwise (cascade) sum; the result depends only on the input order.
inline double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

}  // namespace gtld
