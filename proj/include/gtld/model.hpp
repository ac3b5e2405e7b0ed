#pragma once

// The generalized transmuted lifetime family over a pluggable inner
// transform G = g^alpha:
//
//   u(x) = 1 - exp(-beta G(x)),  v = u^theta
//   F(x) = (1 + lambda) v - lambda v^2
//   f(x) = theta beta G'(x) exp(-beta G(x)) u^(theta-1) (1 + lambda - 2 lambda v)

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gtld/errors.hpp"
#include "gtld/numerics.hpp"

namespace gtld {

/// A strictly increasing map G from (support_low, inf) onto (0, inf).
struct InnerTransform {
  std::function<double(double)> eval;
  std::function<double(double)> deriv;
  std::function<double(double)> inverse;
  /// log G'(x); optional, defaults to log(deriv(x)).  Families whose G'
  /// overflows early (GTWE) supply it to keep log-densities finite.
  std::function<double(double)> log_deriv;
  double support_low = 0.0;
  /// k in G(x) ~ c (x - support_low)^k near the support edge; 0 if unknown
  /// (it is then estimated numerically).
  double edge_order = 0.0;
  std::vector<std::pair<std::string, double>> shape_params;

  double log_deriv_at(double x) const { return log_deriv ? log_deriv(x) : std::log(deriv(x)); }
};

/// (psi, beta, theta, lambda): psi is the sub-family's shape list in its
/// declared order (alpha; alpha and gamma for GTMW; empty for GTE/GTR).
struct ParamVector {
  std::vector<double> shape;
  double beta = 1.0;
  double theta = 1.0;
  double lambda = 0.0;

  bool operator==(const ParamVector&) const = default;
};

inline void validate(const ParamVector& p) {
  for (double s : p.shape)
    if (!(s > 0.0) || !std::isfinite(s)) throw domain_error("shape parameters must be positive and finite");
  if (!(p.beta > 0.0) || !std::isfinite(p.beta)) throw domain_error("beta must be positive and finite");
  if (!(p.theta > 0.0) || !std::isfinite(p.theta)) throw domain_error("theta must be positive and finite");
  if (!(p.lambda >= -1.0 && p.lambda <= 1.0)) throw domain_error("lambda must lie in [-1, 1]");
}

class GtldModel {
 public:
  GtldModel(InnerTransform transform, ParamVector params)
      : transform_(std::move(transform)), params_(std::move(params)) {
    validate(params_);
    if (!transform_.eval || !transform_.deriv || !transform_.inverse)
      throw domain_error("inner transform is missing eval/deriv/inverse");
    if (transform_.edge_order <= 0.0) transform_.edge_order = estimate_edge_order();
  }

  const InnerTransform& transform() const { return transform_; }
  const ParamVector& params() const { return params_; }
  double support_low() const { return transform_.support_low; }

  double cdf(double x) const {
    check_not_below(x, "cdf");
    if (x == support_low()) return 0.0;
    if (std::isinf(x)) return 1.0;
    const double tlu = params_.theta * log_u(x);
    const double v = std::exp(tlu);
    // Near 1 the product form rounds up and down; 1 - S stays monotone.
    if (v > 0.5) return 1.0 - (-std::expm1(tlu)) * (1.0 - params_.lambda * v);
    return v * (1.0 + params_.lambda - params_.lambda * v);
  }

  /// 1 - F computed as (1 - v)(1 - lambda v) with 1 - v = -expm1(theta log u).
  double survival(double x) const {
    check_not_below(x, "survival");
    if (x == support_low()) return 1.0;
    if (std::isinf(x)) return 0.0;
    const double tlu = params_.theta * log_u(x);
    const double one_minus_v = -std::expm1(tlu);
    const double v = std::exp(tlu);
    return one_minus_v * (1.0 - params_.lambda * v);
  }

  double log_pdf(double x) const {
    check_not_below(x, "log_pdf");
    if (x == support_low()) return std::log(edge_limit());
    if (std::isinf(x)) return -kInf;
    const double g = transform_.eval(x);
    if (std::isinf(g)) return -kInf;
    const double lu = log_u_from_g(g);
    const double v = std::exp(params_.theta * lu);
    const double bracket = 1.0 + params_.lambda - 2.0 * params_.lambda * v;
    return std::log(params_.theta * params_.beta) + transform_.log_deriv_at(x) - params_.beta * g +
           (params_.theta - 1.0) * lu + std::log(bracket);
  }

  /// Density; at support_low returns the one-sided limit (0, finite or +inf).
  double pdf(double x) const {
    check_not_below(x, "pdf");
    if (x == support_low()) return edge_limit();
    return std::exp(log_pdf(x));
  }

  double hazard(double x) const {
    const double s = survival(x);
    if (s <= 0.0) throw std::overflow_error("hazard: survival underflows to zero");
    return pdf(x) / s;
  }

  /// Closed-form inverse; A is the rationalized root of
  /// (1+lambda)A - lambda A^2 = p, stable at lambda = 0.
  double quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) throw domain_error("quantile: p must lie in (0, 1)");
    const double l = params_.lambda;
    const double a = 2.0 * p / (1.0 + l + std::sqrt((1.0 + l) * (1.0 + l) - 4.0 * p * l));
    double w = std::pow(a, 1.0 / params_.theta);
    w = std::clamp(w, 0.0, 1.0 - 1e-16);
    const double y = -std::log1p(-w) / params_.beta;
    return transform_.inverse(y);
  }

  /// Same as quantile but accepts the complement q = 1 - p, which keeps
  /// resolution in the far upper tail.
  double quantile_upper(double q) const {
    if (!(q > 0.0 && q < 1.0)) throw domain_error("quantile_upper: q must lie in (0, 1)");
    if (q > 0.5) return quantile(1.0 - q);
    // Solve (1 - v)(1 - lambda v) = q for v near 1: with d = 1 - v,
    // d (1 - lambda + lambda d) = q.
    const double l = params_.lambda;
    const double b = 1.0 - l;
    double d;
    if (l == 0.0) {
      d = q;
    } else {
      d = 2.0 * q / (b + std::sqrt(b * b + 4.0 * l * q));
    }
    // v = 1 - d, u = v^(1/theta), y = -log(1 - u)/beta
    const double log_v = std::log1p(-d);
    const double one_minus_u = -std::expm1(log_v / params_.theta);
    const double y = -std::log(one_minus_u) / params_.beta;
    return transform_.inverse(y);
  }

  /// Local exponent e in f(x) ~ (x - support_low)^e at the support edge.
  double edge_exponent() const { return transform_.edge_order * params_.theta - 1.0; }

 private:
  void check_not_below(double x, const char* who) const {
    if (std::isnan(x) || x < support_low())
      throw domain_error(std::string(who) + ": x below the support");
  }

  static double log_u_from_beta_g(double bg) {
    // log(1 - exp(-bg)) without cancellation at either end.
    return bg > 0.6931471805599453 ? std::log1p(-std::exp(-bg)) : std::log(-std::expm1(-bg));
  }

  double log_u_from_g(double g) const { return log_u_from_beta_g(params_.beta * g); }
  double log_u(double x) const { return log_u_from_g(transform_.eval(x)); }

  double edge_limit() const {
    const double e = edge_exponent();
    if (e > 1e-9) return 0.0;
    if (e < -1e-9) return kInf;
    const double low = support_low();
    const double h = 1e-9 * std::max(1.0, std::fabs(low));
    return std::exp(log_pdf(low + h));
  }

  double estimate_edge_order() const {
    const double low = transform_.support_low;
    const double h = 1e-8 * std::max(1.0, std::fabs(low));
    const double x = low + h;
    return transform_.deriv(x) * (x - low) / transform_.eval(x);
  }

  InnerTransform transform_;
  ParamVector params_;
};

/// Uniform on the open interval (0,1) from the top 52 bits of a 64-bit draw.
/// (With 53 bits the largest value would round to exactly 1.)
inline double open_unit_uniform(std::uint64_t bits) {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

/// n draws by inversion, U from std::mt19937_64(seed) mapped through
/// open_unit_uniform.  The generator is fully specified by the standard, so
/// samples are identical across platforms.
inline std::vector<double> sample(const GtldModel& model, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw domain_error("sample: n must be at least 1");
  std::mt19937_64 rng(seed);
  std::vector<double> out(n);
  for (auto& x : out) x = model.quantile(open_unit_uniform(rng()));
  return out;
}

struct QuantileMeasures {
  double median;
  double moors_kurtosis;
  double bowley_skewness;
};

inline QuantileMeasures quantile_measures(const GtldModel& m) {
  auto q = [&](double p) { return m.quantile(p); };
  const double q1 = q(0.25), q2 = q(0.5), q3 = q(0.75);
  const double mck = (q(7.0 / 8) - q(5.0 / 8) + q(3.0 / 8) - q(1.0 / 8)) / (q(6.0 / 8) - q(2.0 / 8));
  const double bcs = (q3 + q1 - 2.0 * q2) / (q3 - q1);
  return {q2, mck, bcs};
}

}  // namespace gtld
