#pragma once

// The eight built-in inner transforms G = g^alpha.
//
//   gte   G = x                      gtwe  G = exp(x^a) - 1
//   gtr   G = x^2 / 2                gtb12 G = log(1 + x^a)
//   gtw   G = x^a                    gtl   G = log(1 + x/a)
//   gtmw  G = x^a exp(g x)           gtp1  G = log(x/a),  x > a
//
// For gtl and gtp1 the shape value a is an inner scale rather than a power.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gtld/errors.hpp"
#include "gtld/model.hpp"

namespace gtld {

enum class SubfamilyId { GTE, GTR, GTW, GTMW, GTWE, GTB12, GTL, GTP1 };

inline constexpr std::array<SubfamilyId, 8> kAllSubfamilies = {
    SubfamilyId::GTE,  SubfamilyId::GTR,   SubfamilyId::GTW, SubfamilyId::GTMW,
    SubfamilyId::GTWE, SubfamilyId::GTB12, SubfamilyId::GTL, SubfamilyId::GTP1};

inline std::string_view to_string(SubfamilyId id) {
  switch (id) {
    case SubfamilyId::GTE: return "gte";
    case SubfamilyId::GTR: return "gtr";
    case SubfamilyId::GTW: return "gtw";
    case SubfamilyId::GTMW: return "gtmw";
    case SubfamilyId::GTWE: return "gtwe";
    case SubfamilyId::GTB12: return "gtb12";
    case SubfamilyId::GTL: return "gtl";
    case SubfamilyId::GTP1: return "gtp1";
  }
  return "?";
}

inline std::optional<SubfamilyId> parse_subfamily(std::string_view name) {
  for (SubfamilyId id : kAllSubfamilies)
    if (to_string(id) == name) return id;
  return std::nullopt;
}

/// Names of the shape parameters psi, in storage order.
inline std::vector<std::string> shape_names(SubfamilyId id) {
  switch (id) {
    case SubfamilyId::GTE:
    case SubfamilyId::GTR: return {};
    case SubfamilyId::GTMW: return {"alpha", "gamma"};
    default: return {"alpha"};
  }
}

/// Full parameter list, shape first: e.g. {alpha, beta, theta, lambda}.
inline std::vector<std::string> param_names(SubfamilyId id) {
  auto names = shape_names(id);
  names.insert(names.end(), {"beta", "theta", "lambda"});
  return names;
}

inline std::size_t param_count(SubfamilyId id) { return shape_names(id).size() + 3; }

namespace detail {

// Solve x^a exp(g x) = y on (0, inf): h(x) = a log x + g x - log y is
// increasing and concave, so bracket by doubling and finish with
// safeguarded Newton.
inline double modified_weibull_inverse(double a, double g, double y) {
  if (y <= 0.0) return 0.0;
  if (std::isinf(y)) return kInf;
  const double target = std::log(y);
  auto h = [&](double x) { return a * std::log(x) + g * x - target; };
  double lo = 1.0, hi = 1.0;
  while (h(lo) > 0.0) lo *= 0.5;
  while (h(hi) < 0.0) hi *= 2.0;
  double x = std::min(std::max(std::exp(target / a), lo), hi);
  for (int it = 0; it < 200; ++it) {
    const double hx = h(x);
    if (hx == 0.0) return x;
    (hx < 0.0 ? lo : hi) = x;
    double next = x - hx / (a / x + g);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - x) <= 1e-15 * x) return next;
    x = next;
  }
  return x;
}

inline double shape_at(const std::vector<double>& shape, std::size_t i, SubfamilyId id) {
  if (shape.size() != shape_names(id).size())
    throw domain_error(std::string(to_string(id)) + ": expected " + std::to_string(shape_names(id).size()) +
                       " shape parameter(s), got " + std::to_string(shape.size()));
  const double v = shape[i];
  if (!(v > 0.0) || !std::isfinite(v))
    throw domain_error(std::string(to_string(id)) + ": shape parameter '" + shape_names(id)[i] +
                       "' must be positive");
  return v;
}

}  // namespace detail

inline InnerTransform make_transform(SubfamilyId id, const std::vector<double>& shape) {
  InnerTransform t;
  const auto names = shape_names(id);
  if (shape.size() != names.size()) detail::shape_at(shape, 0, id);  // throws with a clear message
  for (std::size_t i = 0; i < names.size(); ++i) t.shape_params.emplace_back(names[i], detail::shape_at(shape, i, id));

  switch (id) {
    case SubfamilyId::GTE:
      t.eval = [](double x) { return x; };
      t.deriv = [](double) { return 1.0; };
      t.inverse = [](double y) { return y; };
      t.edge_order = 1.0;
      break;
    case SubfamilyId::GTR:
      t.eval = [](double x) { return 0.5 * x * x; };
      t.deriv = [](double x) { return x; };
      t.inverse = [](double y) { return std::sqrt(2.0 * y); };
      t.edge_order = 2.0;
      break;
    case SubfamilyId::GTW: {
      const double a = shape[0];
      t.eval = [a](double x) { return std::pow(x, a); };
      t.deriv = [a](double x) { return a * std::pow(x, a - 1.0); };
      t.log_deriv = [a](double x) { return std::log(a) + (a - 1.0) * std::log(x); };
      t.inverse = [a](double y) { return std::pow(y, 1.0 / a); };
      t.edge_order = a;
      break;
    }
    case SubfamilyId::GTMW: {
      const double a = shape[0], g = shape[1];
      t.eval = [a, g](double x) { return std::pow(x, a) * std::exp(g * x); };
      t.deriv = [a, g](double x) { return std::pow(x, a - 1.0) * std::exp(g * x) * (a + g * x); };
      t.log_deriv = [a, g](double x) { return (a - 1.0) * std::log(x) + g * x + std::log(a + g * x); };
      t.inverse = [a, g](double y) { return detail::modified_weibull_inverse(a, g, y); };
      t.edge_order = a;
      break;
    }
    case SubfamilyId::GTWE: {
      const double a = shape[0];
      t.eval = [a](double x) { return std::expm1(std::pow(x, a)); };
      t.deriv = [a](double x) { return a * std::pow(x, a - 1.0) * std::exp(std::pow(x, a)); };
      t.log_deriv = [a](double x) { return std::log(a) + (a - 1.0) * std::log(x) + std::pow(x, a); };
      t.inverse = [a](double y) { return std::pow(std::log1p(y), 1.0 / a); };
      t.edge_order = a;
      break;
    }
    case SubfamilyId::GTB12: {
      const double a = shape[0];
      t.eval = [a](double x) { return std::log1p(std::pow(x, a)); };
      t.deriv = [a](double x) {
        const double xa = std::pow(x, a);
        return a * std::pow(x, a - 1.0) / (1.0 + xa);
      };
      t.log_deriv = [a](double x) {
        return std::log(a) + (a - 1.0) * std::log(x) - std::log1p(std::pow(x, a));
      };
      t.inverse = [a](double y) { return std::pow(std::expm1(y), 1.0 / a); };
      t.edge_order = a;
      break;
    }
    case SubfamilyId::GTL: {
      const double a = shape[0];
      t.eval = [a](double x) { return std::log1p(x / a); };
      t.deriv = [a](double x) { return 1.0 / (a + x); };
      t.inverse = [a](double y) { return a * std::expm1(y); };
      t.edge_order = 1.0;
      break;
    }
    case SubfamilyId::GTP1: {
      const double a = shape[0];
      t.eval = [a](double x) { return std::log(x / a); };
      t.deriv = [](double x) { return 1.0 / x; };
      t.inverse = [a](double y) { return a * std::exp(y); };
      t.support_low = a;
      t.edge_order = 1.0;
      break;
    }
  }
  return t;
}

inline GtldModel make_model(SubfamilyId id, const ParamVector& params) {
  return GtldModel(make_transform(id, params.shape), params);
}

/// Flatten to the order of param_names(id).
inline std::vector<double> to_vector(const ParamVector& p) {
  std::vector<double> v;
  v.reserve(p.shape.size() + 3);
  v = p.shape;
  v.push_back(p.beta);
  v.push_back(p.theta);
  v.push_back(p.lambda);
  return v;
}

inline ParamVector from_vector(SubfamilyId id, const std::vector<double>& v) {
  const std::size_t k = shape_names(id).size();
  if (v.size() != k + 3)
    throw domain_error(std::string(to_string(id)) + ": expected " + std::to_string(k + 3) + " parameters, got " +
                       std::to_string(v.size()));
  ParamVector p;
  p.shape.assign(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k));
  p.beta = v[k];
  p.theta = v[k + 1];
  p.lambda = v[k + 2];
  return p;
}

/// The sub-family CDF as printed in closed form, evaluated directly without
/// the generic inner-transform path.  Used as a differential check.
inline double closed_form_cdf(SubfamilyId id, const ParamVector& p, double x) {
  validate(p);
  const double b = p.beta, th = p.theta, l = p.lambda;
  auto mix = [&](double h) { return (1.0 + l) * std::pow(h, th) - l * std::pow(h, 2.0 * th); };
  auto a = [&](std::size_t i) { return detail::shape_at(p.shape, i, id); };
  const double low = id == SubfamilyId::GTP1 ? a(0) : 0.0;
  if (std::isnan(x) || x < low) throw domain_error("closed_form_cdf: x below the support");
  // 1 - exp(-z) and 1 - (1+y)^-b written with expm1/log1p; otherwise the
  // printed formulas verbatim.
  auto one_minus_exp = [](double z) { return -std::expm1(-z); };
  switch (id) {
    case SubfamilyId::GTE: return mix(one_minus_exp(b * x));
    case SubfamilyId::GTR: return mix(one_minus_exp(0.5 * b * x * x));
    case SubfamilyId::GTW: return mix(one_minus_exp(b * std::pow(x, a(0))));
    case SubfamilyId::GTMW: return mix(one_minus_exp(b * std::pow(x, a(0)) * std::exp(a(1) * x)));
    case SubfamilyId::GTWE: return mix(one_minus_exp(b * std::expm1(std::pow(x, a(0)))));
    case SubfamilyId::GTB12: return mix(one_minus_exp(b * std::log1p(std::pow(x, a(0)))));
    case SubfamilyId::GTL: return mix(one_minus_exp(b * std::log1p(x / a(0))));
    case SubfamilyId::GTP1: return mix(one_minus_exp(b * std::log(x / a(0))));
  }
  return 0.0;
}

}  // namespace gtld
