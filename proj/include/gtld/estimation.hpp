#pragma once

// Point estimation for any sub-family: maximum likelihood and the five
// minimum-distance criteria (OLS, WLS, CvM, AD, RTAD), minimized by BFGS
// in unconstrained coordinates (log for positive parameters, atanh for
// lambda) with numerical gradients and multiple starts.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "gtld/data.hpp"
#include "gtld/errors.hpp"
#include "gtld/model.hpp"
#include "gtld/numerics.hpp"
#include "gtld/subfamilies.hpp"

namespace gtld {

enum class Method { ML, OLS, WLS, CvM, AD, RTAD };

inline constexpr std::array<Method, 6> kAllMethods = {Method::ML, Method::OLS, Method::WLS,
                                                      Method::CvM, Method::AD, Method::RTAD};

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::ML: return "ml";
    case Method::OLS: return "ols";
    case Method::WLS: return "wls";
    case Method::CvM: return "cvm";
    case Method::AD: return "ad";
    case Method::RTAD: return "rtad";
  }
  return "?";
}

inline std::optional<Method> parse_method(std::string_view name) {
  for (Method m : kAllMethods)
    if (to_string(m) == name) return m;
  return std::nullopt;
}

inline constexpr double kLogClamp = 1e-300;

// ---------------------------------------------------------------------------
// Objectives.  Each takes the sample in ascending order (Sample guarantees it).

inline double neg_log_likelihood(const GtldModel& m, const std::vector<double>& x) {
  std::vector<double> terms(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::isnan(x[i]) || x[i] <= m.support_low())
      throw domain_error("neg_log_likelihood: observation #" + std::to_string(i + 1) + " (" + std::to_string(x[i]) +
                         ") is outside the support");
    terms[i] = -m.log_pdf(x[i]);
    if (!std::isfinite(terms[i]))
      throw domain_error("neg_log_likelihood: non-finite log-density at observation #" + std::to_string(i + 1));
  }
  return pairwise_sum(terms);
}

inline double neg_log_likelihood(const ParamVector& p, const Sample& s, SubfamilyId family) {
  return neg_log_likelihood(make_model(family, p), s.values);
}

namespace detail {

inline std::vector<double> cdf_values(const GtldModel& m, const std::vector<double>& x) {
  std::vector<double> F(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) F[i] = m.cdf(x[i]);
  return F;
}

inline std::vector<double> survival_values(const GtldModel& m, const std::vector<double>& x) {
  std::vector<double> S(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) S[i] = m.survival(x[i]);
  return S;
}

inline double clamped_log(double v, std::size_t* clamps) {
  if (v < kLogClamp) {
    if (clamps) ++*clamps;
    v = kLogClamp;
  }
  return std::log(v);
}

}  // namespace detail

/// Sum (F_i - i/(n+1))^2 over the order statistics.
inline double ols_from_cdf(const std::vector<double>& F) {
  const double n = static_cast<double>(F.size());
  double s = 0.0;
  for (std::size_t i = 0; i < F.size(); ++i) {
    const double d = F[i] - (i + 1.0) / (n + 1.0);
    s += d * d;
  }
  return s;
}

/// Same residuals weighted by (n+1)^2 (n+2) / (i (n-i+1)).
inline double wls_from_cdf(const std::vector<double>& F) {
  const double n = static_cast<double>(F.size());
  double s = 0.0;
  for (std::size_t k = 0; k < F.size(); ++k) {
    const double i = k + 1.0;
    const double d = F[k] - i / (n + 1.0);
    s += (n + 1.0) * (n + 1.0) * (n + 2.0) / (i * (n - i + 1.0)) * d * d;
  }
  return s;
}

inline double cvm_from_cdf(const std::vector<double>& F) {
  const double n = static_cast<double>(F.size());
  double s = 1.0 / (12.0 * n);
  for (std::size_t k = 0; k < F.size(); ++k) {
    const double d = F[k] - (2.0 * k + 1.0) / (2.0 * n);
    s += d * d;
  }
  return s;
}

/// A^2; S holds 1 - F at the same points (kept separate for tail accuracy).
inline double ad_from_cdf(const std::vector<double>& F, const std::vector<double>& S, std::size_t* clamps = nullptr) {
  const std::size_t n = F.size();
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k)
    s += (2.0 * k + 1.0) * (detail::clamped_log(F[k], clamps) + detail::clamped_log(S[n - 1 - k], clamps));
  return -static_cast<double>(n) - s / n;
}

inline double rtad_from_cdf(const std::vector<double>& F, const std::vector<double>& S,
                            std::size_t* clamps = nullptr) {
  const std::size_t n = F.size();
  double sum_f = 0.0, s = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sum_f += F[k];
    s += (2.0 * k + 1.0) * detail::clamped_log(S[n - 1 - k], clamps);
  }
  return 0.5 * n - 2.0 * sum_f - s / n;
}

inline double ols_objective(const ParamVector& p, const Sample& s, SubfamilyId family) {
  return ols_from_cdf(detail::cdf_values(make_model(family, p), s.values));
}
inline double wls_objective(const ParamVector& p, const Sample& s, SubfamilyId family) {
  return wls_from_cdf(detail::cdf_values(make_model(family, p), s.values));
}
inline double cvm_objective(const ParamVector& p, const Sample& s, SubfamilyId family) {
  return cvm_from_cdf(detail::cdf_values(make_model(family, p), s.values));
}
inline double ad_objective(const ParamVector& p, const Sample& s, SubfamilyId family, std::size_t* clamps = nullptr) {
  const auto m = make_model(family, p);
  return ad_from_cdf(detail::cdf_values(m, s.values), detail::survival_values(m, s.values), clamps);
}
inline double rtad_objective(const ParamVector& p, const Sample& s, SubfamilyId family,
                             std::size_t* clamps = nullptr) {
  const auto m = make_model(family, p);
  return rtad_from_cdf(detail::cdf_values(m, s.values), detail::survival_values(m, s.values), clamps);
}

/// Value of the chosen criterion (to be minimized).
inline double evaluate_objective(Method method, const ParamVector& p, const Sample& s, SubfamilyId family,
                                 std::size_t* clamps = nullptr) {
  switch (method) {
    case Method::ML: return neg_log_likelihood(p, s, family);
    case Method::OLS: return ols_objective(p, s, family);
    case Method::WLS: return wls_objective(p, s, family);
    case Method::CvM: return cvm_objective(p, s, family);
    case Method::AD: return ad_objective(p, s, family, clamps);
    case Method::RTAD: return rtad_objective(p, s, family, clamps);
  }
  return kInf;
}

// ---------------------------------------------------------------------------
// Unconstrained coordinates

inline constexpr double kLambdaCap = 1.0 - 1e-10;

inline std::vector<double> to_unconstrained(const ParamVector& p) {
  std::vector<double> z;
  for (double s : p.shape) z.push_back(std::log(s));
  z.push_back(std::log(p.beta));
  z.push_back(std::log(p.theta));
  z.push_back(std::atanh(std::clamp(p.lambda, -kLambdaCap, kLambdaCap)));
  return z;
}

inline ParamVector from_unconstrained(const std::vector<double>& z) {
  ParamVector p;
  const std::size_t k = z.size() - 3;
  for (std::size_t i = 0; i < k; ++i) p.shape.push_back(std::exp(z[i]));
  p.beta = std::exp(z[k]);
  p.theta = std::exp(z[k + 1]);
  p.lambda = std::clamp(std::tanh(z[k + 2]), -kLambdaCap, kLambdaCap);
  return p;
}

// ---------------------------------------------------------------------------
// BFGS

struct BfgsOptions {
  int max_iterations = 1000;
  double grad_tol = 1e-6;  // on max |g| relative to max(1, |f|)
  double f_tol = 1e-13;    // relative change that counts as stalled
};

struct BfgsResult {
  std::vector<double> x;
  double f = kInf;
  int iterations = 0;
  bool converged = false;
};

inline std::vector<double> numerical_gradient(const std::function<double(const std::vector<double>&)>& f,
                                              std::vector<double> x) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    const double h = 1e-6 * std::max(1.0, std::fabs(xi));
    x[i] = xi + h;
    const double fp = f(x);
    x[i] = xi - h;
    const double fm = f(x);
    x[i] = xi;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

/// Quasi-Newton minimization with an inverse-Hessian BFGS update and
/// Armijo backtracking.  f may return +inf to reject a point.
inline BfgsResult bfgs_minimize(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x,
                                const BfgsOptions& opt = {}) {
  const std::size_t d = x.size();
  BfgsResult r;
  double fx = f(x);
  if (!std::isfinite(fx)) {
    r.x = x;
    r.f = fx;
    return r;
  }
  auto grad_ok = [&](const std::vector<double>& g, double fv) {
    double gmax = 0.0;
    for (double v : g) gmax = std::max(gmax, std::fabs(v));
    return gmax <= opt.grad_tol * std::max(1.0, std::fabs(fv));
  };
  std::vector<double> H(d * d, 0.0);
  auto reset_h = [&] {
    std::fill(H.begin(), H.end(), 0.0);
    for (std::size_t i = 0; i < d; ++i) H[i * d + i] = 1.0;
  };
  reset_h();
  bool fresh = true;  // H is the identity
  std::vector<double> g = numerical_gradient(f, x);
  int stalls = 0;
  for (int it = 0; it < opt.max_iterations; ++it) {
    r.iterations = it + 1;
    if (std::any_of(g.begin(), g.end(), [](double v) { return !std::isfinite(v); })) break;
    if (grad_ok(g, fx)) {
      r.converged = true;
      break;
    }
    std::vector<double> p(d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) p[i] -= H[i * d + j] * g[j];
    double slope = 0.0;
    for (std::size_t i = 0; i < d; ++i) slope += p[i] * g[i];
    if (!(slope < 0.0)) {  // not a descent direction: fall back to steepest descent
      reset_h();
      fresh = true;
      for (std::size_t i = 0; i < d; ++i) p[i] = -g[i];
      slope = 0.0;
      for (double v : g) slope -= v * v;
    }
    // keep steps in log/atanh space moderate
    double pmax = 0.0;
    for (double v : p) pmax = std::max(pmax, std::fabs(v));
    double step = pmax > 5.0 ? 5.0 / pmax : 1.0;
    std::vector<double> xn(d);
    double fn = kInf;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t i = 0; i < d; ++i) xn[i] = x[i] + step * p[i];
      fn = f(xn);
      if (std::isfinite(fn) && fn <= fx + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (fresh) {  // no progress even along -g: at the noise floor
        r.converged = grad_ok(g, fx * 1e3);
        break;
      }
      reset_h();
      fresh = true;
      continue;
    }
    std::vector<double> gn = numerical_gradient(f, xn);
    std::vector<double> s(d), y(d);
    double sy = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      s[i] = xn[i] - x[i];
      y[i] = gn[i] - g[i];
      sy += s[i] * y[i];
    }
    const double rel_change = std::fabs(fx - fn) / std::max(1.0, std::fabs(fx));
    x = xn;
    g = gn;
    fx = fn;
    if (sy > 1e-12) {
      fresh = false;
      std::vector<double> Hy(d, 0.0);
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) Hy[i] += H[i * d + j] * y[j];
      double yHy = 0.0;
      for (std::size_t i = 0; i < d; ++i) yHy += y[i] * Hy[i];
      const double rho = 1.0 / sy;
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
          H[i * d + j] += rho * ((1.0 + rho * yHy) * s[i] * s[j] - Hy[i] * s[j] - s[i] * Hy[j]);
    }
    if (rel_change < opt.f_tol) {
      if (++stalls >= 5) {
        r.converged = grad_ok(g, fx * 1e3);
        break;
      }
    } else {
      stalls = 0;
    }
  }
  r.x = x;
  r.f = fx;
  return r;
}

// ---------------------------------------------------------------------------
// fit

struct FitOptions {
  std::optional<ParamVector> init;
  /// Entries in param_names order; a value pins that parameter.
  std::vector<std::optional<double>> fixed;
  int starts = 5;
  std::uint64_t seed = 0;
  BfgsOptions bfgs;
};

struct FitResult {
  SubfamilyId family = SubfamilyId::GTE;
  Method method = Method::ML;
  ParamVector estimates;
  std::vector<std::optional<double>> std_errors;  // param_names order; empty until computed
  double objective_value = kInf;
  bool converged = false;
  int iterations = 0;
  int starts_converged = 0;
  std::size_t clamp_events = 0;
};

namespace detail {

inline constexpr double kBarrierOffset = 1e8;
inline constexpr double kBarrierScale = 1e10;

/// Objective with the GTP-I support barrier; +inf for unusable points.
inline double guarded_objective(Method method, const ParamVector& p, const Sample& s, SubfamilyId family) {
  if (family == SubfamilyId::GTP1) {
    const double xmin = s.values.front();
    if (p.shape.size() == 1 && p.shape[0] >= xmin) {
      const double v = (p.shape[0] - xmin) / xmin + 1e-12;
      return kBarrierOffset + kBarrierScale * v * v;
    }
  }
  try {
    const double v = evaluate_objective(method, p, s, family);
    return std::isfinite(v) ? v : kInf;
  } catch (const std::exception&) {
    return kInf;
  }
}

/// theta = 1, lambda = 0 baseline matched to the sample median, with the
/// shape picked on a grid by the fit of F(x_(i)) to (i - 1/2)/n.
inline ParamVector quantile_matched_start(const Sample& s, SubfamilyId family) {
  const auto& x = s.values;
  const double med = sample_quantile(x, 0.5);
  std::vector<std::vector<double>> shapes;
  switch (family) {
    case SubfamilyId::GTE:
    case SubfamilyId::GTR: shapes.push_back({}); break;
    case SubfamilyId::GTL:
      for (int k = -12; k <= 12; ++k) shapes.push_back({med * std::pow(10.0, k / 4.0)});
      break;
    case SubfamilyId::GTP1:
      for (int k = 1; k <= 20; ++k) shapes.push_back({x.front() * (1.0 - std::pow(0.7, k))});
      break;
    case SubfamilyId::GTMW:
      for (int k = -8; k <= 8; ++k)
        for (double g : {1e-3, 1e-2, 0.1, 0.5})
          shapes.push_back({std::pow(10.0, k / 8.0), g / std::max(med, 1e-12)});
      break;
    default:
      for (int k = -12; k <= 12; ++k) shapes.push_back({std::pow(10.0, k / 8.0)});
  }
  ParamVector best;
  double best_score = kInf;
  for (const auto& shape : shapes) {
    try {
      const auto t = make_transform(family, shape);
      const double gm = t.eval(med);
      if (!(gm > 0.0) || !std::isfinite(gm)) continue;
      ParamVector p{shape, std::log(2.0) / gm, 1.0, 0.0};
      validate(p);
      const GtldModel m(t, p);
      double score = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = m.cdf(x[i]) - (i + 0.5) / x.size();
        score += d * d;
      }
      if (score < best_score) {
        best_score = score;
        best = p;
      }
    } catch (const std::exception&) {
    }
  }
  if (!std::isfinite(best_score)) throw convergence_error("fit: no usable starting point", kInf, kInf);
  return best;
}

}  // namespace detail

/// Minimizes the chosen criterion from a quantile-matched start (or
/// options.init) plus starts-1 jittered copies; returns the best converged
/// run, or the best run flagged converged = false.
inline FitResult fit(const Sample& s, SubfamilyId family, Method method, const FitOptions& options = {}) {
  const std::size_t k = param_count(family);
  std::vector<std::optional<double>> fixed = options.fixed;
  fixed.resize(k);

  ParamVector base = options.init ? *options.init : detail::quantile_matched_start(s, family);
  {
    auto v = to_vector(base);
    for (std::size_t i = 0; i < k; ++i)
      if (fixed[i]) v[i] = *fixed[i];
    base = from_vector(family, v);
    validate(base);
  }
  const std::vector<double> z_base = to_unconstrained(base);
  std::vector<std::size_t> free_idx;
  for (std::size_t i = 0; i < k; ++i)
    if (!fixed[i]) free_idx.push_back(i);

  auto assemble = [&](const std::vector<double>& w) {
    std::vector<double> z = z_base;
    for (std::size_t j = 0; j < free_idx.size(); ++j) z[free_idx[j]] = w[j];
    return from_unconstrained(z);
  };
  auto objective = [&](const std::vector<double>& w) {
    return detail::guarded_objective(method, assemble(w), s, family);
  };

  std::vector<double> w0(free_idx.size());
  for (std::size_t j = 0; j < free_idx.size(); ++j) w0[j] = z_base[free_idx[j]];

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> jitter(0.0, 0.5);

  FitResult out;
  out.family = family;
  out.method = method;
  std::optional<BfgsResult> best, best_conv;
  const int starts = std::max(1, options.starts);
  for (int st = 0; st < starts; ++st) {
    std::vector<double> w = w0;
    if (st > 0)
      for (double& v : w) v += jitter(rng);
    BfgsResult r = free_idx.empty() ? BfgsResult{w, objective(w), 0, true} : bfgs_minimize(objective, w, options.bfgs);
    out.iterations += r.iterations;
    if (!std::isfinite(r.f)) continue;
    if (r.converged) ++out.starts_converged;
    if (!best || r.f < best->f) best = r;
    if (r.converged && (!best_conv || r.f < best_conv->f)) best_conv = r;
  }
  if (!best) throw convergence_error("fit: all starts failed", kInf, kInf);
  // a converged run is preferred unless an unconverged one is clearly lower
  const BfgsResult& pick =
      best_conv && best_conv->f <= best->f + 1e-6 * std::max(1.0, std::fabs(best->f)) ? *best_conv : *best;
  out.estimates = assemble(pick.x);
  out.converged = pick.converged;
  if (family == SubfamilyId::GTP1 && out.estimates.shape[0] >= s.values.front())
    throw convergence_error("fit: GTP-I estimate left the support region", pick.f, kInf);
  out.objective_value = evaluate_objective(method, out.estimates, s, family, &out.clamp_events);
  return out;
}

// ---------------------------------------------------------------------------
// Standard errors from the observed information

namespace detail {

/// In-place Cholesky; false if A is not positive definite.
inline bool cholesky(std::vector<double>& A, std::size_t d) {
  for (std::size_t j = 0; j < d; ++j) {
    double s = A[j * d + j];
    for (std::size_t k = 0; k < j; ++k) s -= A[j * d + k] * A[j * d + k];
    if (!(s > 0.0) || !std::isfinite(s)) return false;
    A[j * d + j] = std::sqrt(s);
    for (std::size_t i = j + 1; i < d; ++i) {
      double t = A[i * d + j];
      for (std::size_t k = 0; k < j; ++k) t -= A[i * d + k] * A[j * d + k];
      A[i * d + j] = t / A[j * d + j];
    }
  }
  return true;
}

/// Diagonal of A^{-1} given its Cholesky factor L (A = L L^T).
inline std::vector<double> inverse_diagonal(const std::vector<double>& L, std::size_t d) {
  std::vector<double> diag(d, 0.0);
  for (std::size_t c = 0; c < d; ++c) {
    std::vector<double> y(d, 0.0);  // solve L y = e_c
    for (std::size_t i = 0; i < d; ++i) {
      double t = i == c ? 1.0 : 0.0;
      for (std::size_t k = 0; k < i; ++k) t -= L[i * d + k] * y[k];
      y[i] = t / L[i * d + i];
    }
    // (A^{-1})_{cc} = |L^{-1} e_c|^2
    for (double v : y) diag[c] += v * v;
  }
  return diag;
}

}  // namespace detail

/// Square roots of the diagonal of the inverse observed information
/// (numerical Hessian of the NLL in the original parameters, step
/// 1e-4 max(|p|, 1)).  Fixed parameters get no entry; every entry is absent
/// if the Hessian is not positive definite.
inline std::vector<std::optional<double>> standard_errors(const FitResult& result, const Sample& s,
                                                          const std::vector<std::optional<double>>& fixed = {}) {
  const SubfamilyId family = result.family;
  const std::size_t k = param_count(family);
  std::vector<std::optional<double>> out(k);
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < k; ++i)
    if (i >= fixed.size() || !fixed[i]) idx.push_back(i);
  const std::size_t d = idx.size();
  if (d == 0) return out;

  const std::vector<double> p0 = to_vector(result.estimates);
  auto nll = [&](const std::vector<double>& v) {
    try {
      return neg_log_likelihood(from_vector(family, v), s, family);
    } catch (const std::exception&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
  std::vector<double> h(d);
  for (std::size_t a = 0; a < d; ++a) h[a] = 1e-4 * std::max(std::fabs(p0[idx[a]]), 1.0);
  const double f0 = nll(p0);
  std::vector<double> H(d * d);
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a; b < d; ++b) {
      auto at = [&](double da, double db) {
        std::vector<double> v = p0;
        v[idx[a]] += da;
        v[idx[b]] += db;
        return nll(v);
      };
      double val;
      if (a == b) {
        val = (at(h[a], 0) - 2.0 * f0 + at(-h[a], 0)) / (h[a] * h[a]);
      } else {
        val = (at(h[a], h[b]) - at(h[a], -h[b]) - at(-h[a], h[b]) + at(-h[a], -h[b])) / (4.0 * h[a] * h[b]);
      }
      H[a * d + b] = H[b * d + a] = val;
    }
  }
  if (!detail::cholesky(H, d)) return out;
  const auto diag = detail::inverse_diagonal(H, d);
  for (std::size_t a = 0; a < d; ++a)
    if (diag[a] >= 0.0 && std::isfinite(diag[a])) out[idx[a]] = std::sqrt(diag[a]);
  return out;
}

// ---------------------------------------------------------------------------
// theta-likelihood diagnostics, others held fixed.  y_i = 1 - exp(-beta G(x_i)).

struct ThetaProfile {
  std::vector<double> log_y;  // log y_i
  double lambda;
};

inline ThetaProfile theta_profile(const Sample& s, SubfamilyId family, const std::vector<double>& shape, double beta,
                                  double lambda) {
  const auto t = make_transform(family, shape);
  ThetaProfile tp{{}, lambda};
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double bg = beta * t.eval(s.values[i]);
    const double ly = bg > 0.6931471805599453 ? std::log1p(-std::exp(-bg)) : std::log(-std::expm1(-bg));
    if (!(ly < 0.0) || !std::isfinite(ly))
      throw domain_error("theta_profile: y_" + std::to_string(i + 1) + " is not inside (0, 1)");
    tp.log_y.push_back(ly);
  }
  return tp;
}

/// d l / d theta
inline double theta_score(const ThetaProfile& tp, double theta) {
  const double l = tp.lambda, n = static_cast<double>(tp.log_y.size());
  double s = n / theta;
  for (double ly : tp.log_y) {
    const double yt = std::exp(theta * ly);
    s += ly - 2.0 * l * yt * ly / (1.0 + l - 2.0 * l * yt);
  }
  return s;
}

/// d^2 l / d theta^2
inline double theta_curvature(const ThetaProfile& tp, double theta) {
  const double l = tp.lambda, n = static_cast<double>(tp.log_y.size());
  double s = -n / (theta * theta);
  for (double ly : tp.log_y) {
    const double yt = std::exp(theta * ly);
    const double den = 1.0 + l - 2.0 * l * yt;
    s -= 2.0 * l * (1.0 + l) * yt * ly * ly / (den * den);
  }
  return s;
}

/// l(theta) up to terms free of theta.
inline double theta_loglik(const ThetaProfile& tp, double theta) {
  const double l = tp.lambda, n = static_cast<double>(tp.log_y.size());
  double s = n * std::log(theta);
  for (double ly : tp.log_y) s += (theta - 1.0) * ly + std::log(1.0 + l - 2.0 * l * std::exp(theta * ly));
  return s;
}

struct ThetaBracket {
  double lower, upper;
};

/// [n / (-2 sum log y), n / (-sum log y)]; it holds a root of the theta score
/// when lambda lies in (-1, 0).  nullopt outside that range.
inline std::optional<ThetaBracket> mle_theta_bracket(const ThetaProfile& tp) {
  if (!(tp.lambda > -1.0 && tp.lambda < 0.0)) return std::nullopt;
  double sum = 0.0;
  for (double ly : tp.log_y) sum += ly;
  const double n = static_cast<double>(tp.log_y.size());
  return ThetaBracket{n / (-2.0 * sum), n / (-sum)};
}

inline std::optional<ThetaBracket> mle_theta_bracket(const Sample& s, SubfamilyId family,
                                                     const std::vector<double>& shape, double beta, double lambda) {
  if (!(lambda > -1.0 && lambda < 0.0)) return std::nullopt;
  return mle_theta_bracket(theta_profile(s, family, shape, beta, lambda));
}

}  // namespace gtld
