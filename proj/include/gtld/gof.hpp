#pragma once

// Goodness of fit: Kolmogorov-Smirnov, Cramer-von Mises and
// Anderson-Darling statistics with asymptotic p-values, AIC, and ranking
// of candidate fits.
//
// The p-values use the simple-hypothesis limiting laws and ignore the fact
// that parameters were estimated from the same data, so they are
// optimistic.

#include <algorithm>
#include <cmath>
#include <future>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "gtld/data.hpp"
#include "gtld/estimation.hpp"
#include "gtld/model.hpp"
#include "gtld/subfamilies.hpp"

namespace gtld {

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// ---------------------------------------------------------------------------
// Limiting distributions

/// P(K > x) for the Kolmogorov distribution.
inline double kolmogorov_sf(double x) {
  if (!(x > 0.0)) return 1.0;
  constexpr double pi = 3.14159265358979323846;
  if (x < 1.0) {
    // P(K <= x) = sqrt(2 pi)/x sum exp(-(2k-1)^2 pi^2 / (8 x^2))
    double s = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double t = std::exp(-(2.0 * k - 1) * (2.0 * k - 1) * pi * pi / (8.0 * x * x));
      s += t;
      if (t < 1e-17 * s) break;
    }
    return std::clamp(1.0 - std::sqrt(2.0 * pi) / x * s, 0.0, 1.0);
  }
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double t = std::exp(-2.0 * k * k * x * x);
    s += (k % 2 ? 2.0 : -2.0) * t;
    if (t < 1e-17) break;
  }
  return std::clamp(s, 0.0, 1.0);
}

/// P(W^2 <= z) for the limiting Cramer-von Mises law, via the
/// Bessel-function series of Anderson and Darling (1952).
inline double cvm_limit_cdf(double z) {
  if (!(z > 0.0)) return 0.0;
  if (z > 10.0) return 1.0;
  constexpr double pi = 3.14159265358979323846;
  double s = 0.0;
  for (int j = 0; j < 50; ++j) {
    const double y = 4.0 * j + 1.0;
    const double q = y * y / (16.0 * z);
    if (q > 700.0) break;
    const double coef = std::exp(std::lgamma(j + 0.5) - std::lgamma(j + 1.0)) / (std::pow(pi, 1.5) * std::sqrt(z));
    const double t = coef * std::sqrt(y) * std::exp(-q) * std::cyl_bessel_k(0.25, q);
    s += t;
    if (std::fabs(t) < 1e-16) break;
  }
  return std::clamp(s, 0.0, 1.0);
}

/// P(A^2 <= z) in the limit (Marsaglia and Marsaglia, 2004).
inline double ad_limit_cdf(double z) {
  if (!(z > 0.0)) return 0.0;
  if (z < 2.0)
    return std::exp(-1.2337141 / z) / std::sqrt(z) *
           (2.00012 + (0.247105 - (0.0649821 - (0.0347962 - (0.011672 - 0.00168691 * z) * z) * z) * z) * z);
  return std::exp(
      -std::exp(1.0776 - (2.30695 - (0.43424 - (0.082433 - (0.008056 - 0.0003146 * z) * z) * z) * z) * z));
}

/// Finite-n correction to ad_limit_cdf, same source.
inline double ad_errfix(int n, double x) {
  if (x > 0.8)
    return (-130.2137 + (745.2337 - (1705.091 - (1950.646 - (1116.360 - 255.7844 * x) * x) * x) * x) * x) / n;
  const double c = 0.01265 + 0.1757 / n;
  if (x < c) {
    double t = x / c;
    t = std::sqrt(t) * (1.0 - t) * (49.0 * t - 102.0);
    return t * (0.0037 / (1.0 * n * n) + 0.00078 / n + 0.00006) / n;
  }
  double t = (x - c) / (0.8 - c);
  t = -0.00022633 + (6.54034 - (14.6538 - (14.458 - (8.259 - 1.91864 * t) * t) * t) * t) * t;
  return t * (0.04213 + 0.01365 / n) / n;
}

inline double ad_cdf(int n, double z) {
  const double x = ad_limit_cdf(z);
  return std::clamp(x + ad_errfix(n, x), 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Statistics from fitted CDF values at the order statistics

inline TestResult ks_from_cdf(const std::vector<double>& F) {
  const double n = static_cast<double>(F.size());
  double d = 0.0;
  for (std::size_t i = 0; i < F.size(); ++i)
    d = std::max({d, (i + 1.0) / n - F[i], F[i] - i / n});
  return {d, kolmogorov_sf(std::sqrt(n) * d)};
}

inline TestResult cvm_test_from_cdf(const std::vector<double>& F) {
  const double w = cvm_from_cdf(F);
  return {w, std::clamp(1.0 - cvm_limit_cdf(w), 0.0, 1.0)};
}

inline TestResult ad_test_from_cdf(const std::vector<double>& F, const std::vector<double>& S,
                                   std::size_t* clamps = nullptr) {
  const double a = ad_from_cdf(F, S, clamps);
  return {a, std::clamp(1.0 - ad_cdf(static_cast<int>(F.size()), a), 0.0, 1.0)};
}

inline TestResult ks_statistic(const Sample& s, const GtldModel& m) {
  return ks_from_cdf(detail::cdf_values(m, s.values));
}
inline TestResult cvm_statistic(const Sample& s, const GtldModel& m) {
  return cvm_test_from_cdf(detail::cdf_values(m, s.values));
}
inline TestResult ad_statistic(const Sample& s, const GtldModel& m, std::size_t* clamps = nullptr) {
  return ad_test_from_cdf(detail::cdf_values(m, s.values), detail::survival_values(m, s.values), clamps);
}

// ---------------------------------------------------------------------------
// Reports

struct GofReport {
  double neg2_loglik = 0.0;
  double aic = 0.0;
  int k = 0;
  TestResult ks, cvm, ad;
  std::size_t n = 0;
};

inline GofReport gof_report(const Sample& s, SubfamilyId family, const ParamVector& p) {
  const auto m = make_model(family, p);
  GofReport r;
  r.n = s.size();
  r.k = static_cast<int>(param_count(family));
  r.neg2_loglik = 2.0 * neg_log_likelihood(m, s.values);
  r.aic = r.neg2_loglik + 2.0 * r.k;
  r.ks = ks_statistic(s, m);
  r.cvm = cvm_statistic(s, m);
  r.ad = ad_statistic(s, m);
  return r;
}

inline nlohmann::json to_json(const TestResult& t) { return {{"statistic", t.statistic}, {"p_value", t.p_value}}; }

inline nlohmann::json to_json(const GofReport& r) {
  return {{"neg2_loglik", r.neg2_loglik}, {"aic", r.aic},       {"ks", to_json(r.ks)},
          {"cvm", to_json(r.cvm)},        {"ad", to_json(r.ad)}, {"n", r.n}};
}

struct Candidate {
  SubfamilyId family;
  Method method = Method::ML;
};

struct Selection {
  Candidate candidate;
  std::optional<FitResult> fit;
  std::optional<GofReport> report;
  std::string error;  // set when fitting or scoring failed
};

/// Fits every candidate (concurrently), scores it and sorts by AIC, ties
/// broken by the KS statistic.  Failed candidates are kept, ranked last.
inline std::vector<Selection> model_select(const Sample& s, const std::vector<Candidate>& candidates,
                                           const FitOptions& options = {}) {
  if (candidates.empty()) throw domain_error("model_select: no candidates");
  std::vector<std::future<Selection>> jobs;
  for (const auto& c : candidates)
    jobs.push_back(std::async(std::launch::async, [&s, c, &options] {
      Selection sel{c, std::nullopt, std::nullopt, {}};
      try {
        FitOptions o = options;
        o.fixed.clear();
        FitResult r = fit(s, c.family, c.method, o);
        if (c.method == Method::ML) r.std_errors = standard_errors(r, s);
        sel.report = gof_report(s, c.family, r.estimates);
        sel.fit = std::move(r);
      } catch (const std::exception& e) {
        sel.error = e.what();
      }
      return sel;
    }));
  std::vector<Selection> out;
  for (auto& j : jobs) out.push_back(j.get());
  std::stable_sort(out.begin(), out.end(), [](const Selection& a, const Selection& b) {
    if (a.report.has_value() != b.report.has_value()) return a.report.has_value();
    if (!a.report) return false;
    if (a.report->aic != b.report->aic) return a.report->aic < b.report->aic;
    return a.report->ks.statistic < b.report->ks.statistic;
  });
  return out;
}

}  // namespace gtld
