#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gtld/estimation.hpp"

using namespace gtld;

namespace {

Sample draw(SubfamilyId id, const ParamVector& p, std::size_t n, std::uint64_t seed) {
  return Sample("sim", sample(make_model(id, p), n, seed));
}

}  // namespace

TEST(Methods, NamesRoundTrip) {
  for (Method m : kAllMethods) EXPECT_EQ(parse_method(to_string(m)), m);
  EXPECT_FALSE(parse_method("mle").has_value());
}

TEST(NegLogLik, ExponentialAndDensityIdentity) {
  const Sample s("s", {1.0, 2.0, 3.0});
  EXPECT_NEAR(neg_log_likelihood({{}, 1.0, 1.0, 0.0}, s, SubfamilyId::GTE), 6.0, 1e-14);
  EXPECT_NEAR(neg_log_likelihood({{}, 2.0, 1.0, 0.0}, s, SubfamilyId::GTE), 12.0 - 3 * std::log(2.0), 1e-13);

  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> sh(0.5, 2.5), l(-1.0, 1.0);
  for (SubfamilyId id : kAllSubfamilies) {
    for (int rep = 0; rep < 5; ++rep) {
      ParamVector p;
      for (std::size_t i = 0; i < shape_names(id).size(); ++i) p.shape.push_back(i ? 0.2 : sh(rng));
      p.beta = sh(rng) / 2;
      p.theta = sh(rng);
      p.lambda = l(rng);
      const auto m = make_model(id, p);
      const auto s2 = Sample("r", sample(m, 200, rng()));
      double ref = 0.0;
      for (double x : s2.values) ref -= std::log(m.pdf(x));
      EXPECT_NEAR(neg_log_likelihood(p, s2, id), ref, 1e-10 * std::max(1.0, std::fabs(ref))) << to_string(id);
    }
  }
}

TEST(NegLogLik, OutOfSupportReportsIndex) {
  const Sample s("s", {0.5, 3.0});
  try {
    neg_log_likelihood({{1.0}, 1.0, 1.0, 0.0}, s, SubfamilyId::GTP1);
    FAIL();
  } catch (const domain_error& e) {
    EXPECT_NE(std::string(e.what()).find("1"), std::string::npos);
  }
}

TEST(NegLogLik, GaugeReferencePoint) {
  const double v = 2 * neg_log_likelihood({{1.056}, 0.108, 3.641, 0.669}, datasets::gauge(), SubfamilyId::GTWE);
  EXPECT_NEAR(v, 102.2021, 0.05);
}

TEST(Objectives, HandComputedValues) {
  EXPECT_NEAR(ols_from_cdf({0.7}), 0.04, 1e-15);
  EXPECT_NEAR(wls_from_cdf({0.7}), 0.48, 1e-14);
  EXPECT_NEAR(cvm_from_cdf({0.5}), 1.0 / 12.0, 1e-15);
  EXPECT_NEAR(ad_from_cdf({0.25, 0.75}, {0.75, 0.25}), -2 - 0.5 * (2 * std::log(0.25) + 6 * std::log(0.75)), 1e-14);
  EXPECT_NEAR(ad_from_cdf({0.25, 0.75}, {0.75, 0.25}), 0.2493, 1e-4);
  EXPECT_NEAR(rtad_from_cdf({0.5}, {0.5}), 0.5 - 1.0 - std::log(0.5), 1e-15);
}

TEST(Objectives, PerfectPlottingPositions) {
  const int n = 9;
  std::vector<double> a(n), b(n);
  for (int i = 0; i < n; ++i) {
    a[i] = (i + 1.0) / (n + 1.0);
    b[i] = (2.0 * i + 1) / (2.0 * n);
  }
  EXPECT_EQ(ols_from_cdf(a), 0.0);
  EXPECT_EQ(wls_from_cdf(a), 0.0);
  EXPECT_NEAR(cvm_from_cdf(b), 1.0 / (12.0 * n), 1e-16);
}

TEST(Objectives, WlsWeightsSymmetric) {
  // One residual at rank i and the mirrored one at n+1-i cost the same.
  const int n = 7;
  for (int i = 0; i < n; ++i) {
    std::vector<double> a(n), b(n);
    for (int k = 0; k < n; ++k) a[k] = b[k] = (k + 1.0) / (n + 1.0);
    a[i] += 0.01;
    b[n - 1 - i] += 0.01;
    EXPECT_NEAR(wls_from_cdf(a), wls_from_cdf(b), 1e-15);
  }
}

TEST(Objectives, RtadSignStructure) {
  // Pushing F toward 1 lowers -2 sum F and raises -log S.
  const std::vector<double> F{0.3, 0.5, 0.7}, S{0.7, 0.5, 0.3};
  const std::vector<double> F2{0.4, 0.6, 0.8}, S2{0.6, 0.4, 0.2};
  const double base = rtad_from_cdf(F, S), up = rtad_from_cdf(F2, S2);
  double dsum = 0, dlog = 0;
  for (int i = 0; i < 3; ++i) {
    dsum += -2 * (F2[i] - F[i]);
    dlog += -(2.0 * i + 1) / 3.0 * (std::log(S2[2 - i]) - std::log(S[2 - i]));
  }
  EXPECT_LT(dsum, 0.0);
  EXPECT_GT(dlog, 0.0);
  EXPECT_NEAR(up - base, dsum + dlog, 1e-14);
}

TEST(Objectives, ClampsAreCounted) {
  std::size_t clamps = 0;
  const double v = ad_from_cdf({0.5, 1.0}, {0.5, 0.0}, &clamps);
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_EQ(clamps, 1u);  // only S = 0 needs the clamp; log F(=1) is 0
}

TEST(Objectives, InvariantUnderIncreasingTransform) {
  // GTW(alpha, beta, theta, lambda) on x is GTE(beta, theta, lambda) on x^alpha.
  const ParamVector w{{1.7}, 0.8, 1.3, -0.4}, e{{}, 0.8, 1.3, -0.4};
  const auto s = draw(SubfamilyId::GTW, w, 60, 3);
  std::vector<double> y;
  for (double x : s.values) y.push_back(std::pow(x, 1.7));
  const Sample sy("y", y);
  for (Method m : {Method::OLS, Method::WLS, Method::CvM, Method::AD, Method::RTAD})
    EXPECT_NEAR(evaluate_objective(m, w, s, SubfamilyId::GTW), evaluate_objective(m, e, sy, SubfamilyId::GTE), 1e-10)
        << to_string(m);
}

TEST(Objectives, TiedPointsOrderIrrelevant) {
  const ParamVector p{{}, 1.0, 1.2, 0.3};
  const Sample a("a", {0.5, 0.5, 1.0, 2.0, 2.0}), b("b", {2.0, 0.5, 2.0, 1.0, 0.5});
  for (Method m : kAllMethods)
    EXPECT_EQ(evaluate_objective(m, p, a, SubfamilyId::GTE), evaluate_objective(m, p, b, SubfamilyId::GTE));
}

TEST(Coordinates, RoundTrip) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> pos(0.01, 50.0), l(-0.999, 0.999);
  for (int i = 0; i < 1000; ++i) {
    const ParamVector p{{pos(rng), pos(rng)}, pos(rng), pos(rng), l(rng)};
    const auto q = from_unconstrained(to_unconstrained(p));
    for (std::size_t k = 0; k < 2; ++k) EXPECT_NEAR(q.shape[k] / p.shape[k], 1.0, 1e-14);
    EXPECT_NEAR(q.beta / p.beta, 1.0, 1e-14);
    EXPECT_NEAR(q.theta / p.theta, 1.0, 1e-14);
    EXPECT_NEAR(q.lambda, p.lambda, 1e-14);
  }
  EXPECT_LE(std::fabs(from_unconstrained({0.0, 0.0, 400.0}).lambda), kLambdaCap);
}

TEST(Bfgs, Rosenbrock) {
  auto f = [](const std::vector<double>& x) {
    return 100 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1 - x[0], 2);
  };
  const auto r = bfgs_minimize(f, {-1.2, 1.0});
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.x[0], 1.0, 1e-4);
  EXPECT_NEAR(r.x[1], 1.0, 1e-4);
}

TEST(Fit, ExponentialConsistency) {
  const auto s = draw(SubfamilyId::GTE, {{}, 1.0, 1.0, 0.0}, 5000, 7);
  const auto r = fit(s, SubfamilyId::GTE, Method::ML);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.estimates.beta, 1.0, 0.05);
  EXPECT_NEAR(r.estimates.theta, 1.0, 0.1);
  EXPECT_NEAR(r.objective_value, neg_log_likelihood(r.estimates, s, SubfamilyId::GTE), 1e-12);
}

// A single n = 100 fit has RMSE about 0.16 per coordinate, so the check is
// on the estimator's sampling behaviour over many seeded samples.
TEST(Fit, OlsWithLambdaFixed) {
  FitOptions o;
  o.fixed = {std::nullopt, std::nullopt, 0.0};
  double bias_b = 0, bias_t = 0, mse_b = 0, mse_t = 0;
  const int reps = 200;
  for (int seed = 0; seed < reps; ++seed) {
    const auto s = draw(SubfamilyId::GTE, {{}, 1.0, 1.0, 0.0}, 100, 1000 + seed);
    const auto r = fit(s, SubfamilyId::GTE, Method::OLS, o);
    ASSERT_EQ(r.estimates.lambda, 0.0);
    const double db = r.estimates.beta - 1.0, dt = r.estimates.theta - 1.0;
    bias_b += db / reps;
    bias_t += dt / reps;
    mse_b += db * db / reps;
    mse_t += dt * dt / reps;
  }
  EXPECT_LT(std::fabs(bias_b), 0.05);
  EXPECT_LT(std::fabs(bias_t), 0.05);
  EXPECT_LT(std::sqrt(mse_b), 0.25);
  EXPECT_LT(std::sqrt(mse_t), 0.25);
}

TEST(Fit, Deterministic) {
  const auto s = draw(SubfamilyId::GTWE, {{1.5}, 2.0, 0.9, 0.8}, 80, 9);
  FitOptions o;
  o.seed = 17;
  const auto a = fit(s, SubfamilyId::GTWE, Method::AD, o), b = fit(s, SubfamilyId::GTWE, Method::AD, o);
  EXPECT_EQ(a.estimates, b.estimates);
  EXPECT_EQ(a.objective_value, b.objective_value);
}

TEST(Fit, GaugeWeibullExponential) {
  const auto s = datasets::gauge();
  auto r = fit(s, SubfamilyId::GTWE, Method::ML);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(2 * r.objective_value, 102.26);
  const double ref[] = {1.056, 0.108, 3.641, 0.669}, se[] = {0.174, 0.083, 2.035, 0.576};
  const auto est = to_vector(r.estimates);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(est[i], ref[i], 2 * se[i]) << i;
  const auto ses = standard_errors(r, s);
  for (int i = 0; i < 4; ++i) {
    ASSERT_TRUE(ses[i].has_value()) << i;
    EXPECT_GT(*ses[i], se[i] / 2) << i;
    EXPECT_LT(*ses[i], se[i] * 2) << i;
  }
}

TEST(Fit, FailureTimesExponential) {
  const auto s = datasets::failure();
  const auto r = fit(s, SubfamilyId::GTE, Method::ML);
  EXPECT_TRUE(r.converged);
  // The published point gives 300.6038; the free fit is at least as good.
  EXPECT_NEAR(2 * neg_log_likelihood({{}, 0.099, 0.688, 0.01}, s, SubfamilyId::GTE), 300.6038, 0.05);
  EXPECT_LE(2 * r.objective_value, 300.66);
  const double ref[] = {0.099, 0.688, 0.01}, se[] = {0.038, 0.230, 0.904};
  const auto est = to_vector(r.estimates);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(est[i], ref[i], 2 * se[i]) << i;
}

TEST(Fit, ParetoBarrierKeepsSupport) {
  const auto s = draw(SubfamilyId::GTP1, {{1.0}, 2.0, 1.5, 0.2}, 200, 10);
  const auto r = fit(s, SubfamilyId::GTP1, Method::ML);
  EXPECT_LT(r.estimates.shape[0], s.values.front());
  EXPECT_TRUE(std::isfinite(r.objective_value));
}

TEST(Fit, ScaleEquivarianceWeibull) {
  const auto s = draw(SubfamilyId::GTW, {{1.8}, 1.0, 1.5, 0.3}, 300, 11);
  std::vector<double> y;
  const double c = 3.0;
  for (double x : s.values) y.push_back(c * x);
  const Sample sc("scaled", y);
  const auto a = fit(s, SubfamilyId::GTW, Method::ML);
  FitOptions o;
  ParamVector init = a.estimates;
  init.beta *= std::pow(c, -init.shape[0]);
  o.init = init;
  const auto b = fit(sc, SubfamilyId::GTW, Method::ML, o);
  EXPECT_NEAR(b.estimates.shape[0], a.estimates.shape[0], 1e-4);
  EXPECT_NEAR(b.estimates.theta, a.estimates.theta, 1e-4);
  EXPECT_NEAR(b.estimates.lambda, a.estimates.lambda, 1e-4);
  EXPECT_NEAR(b.estimates.beta / (a.estimates.beta * std::pow(c, -a.estimates.shape[0])), 1.0, 1e-4);
}

TEST(StandardErrors, ExponentialFisherInformation) {
  const auto s = draw(SubfamilyId::GTE, {{}, 2.0, 1.0, 0.0}, 4000, 12);
  FitOptions o;
  o.fixed = {std::nullopt, 1.0, 0.0};
  const auto r = fit(s, SubfamilyId::GTE, Method::ML, o);
  const auto se = standard_errors(r, s, o.fixed);
  ASSERT_TRUE(se[0].has_value());
  EXPECT_FALSE(se[1].has_value());
  EXPECT_NEAR(*se[0] / (r.estimates.beta / std::sqrt(4000.0)), 1.0, 0.2);
}

TEST(StandardErrors, DegenerateSampleDoesNotCrash) {
  const Sample s("tiny", {1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.1});
  const auto r = fit(s, SubfamilyId::GTWE, Method::ML);
  std::vector<std::optional<double>> se;
  EXPECT_NO_THROW(se = standard_errors(r, s));
  EXPECT_EQ(se.size(), 4u);
}

TEST(ThetaBracket, DirectSubstitution) {
  ThetaProfile tp{{-1.0, -1.0, -1.0, -1.0}, -0.5};
  const auto b = mle_theta_bracket(tp);
  ASSERT_TRUE(b.has_value());
  EXPECT_DOUBLE_EQ(b->lower, 0.5);
  EXPECT_DOUBLE_EQ(b->upper, 1.0);
  tp.lambda = 0.3;
  EXPECT_FALSE(mle_theta_bracket(tp).has_value());
}

TEST(ThetaBracket, ScoreChangesSignOnSeededSamples) {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> l(-0.99, -0.01), t(0.3, 3.0);
  for (int rep = 0; rep < 100; ++rep) {
    const double lam = l(rng);
    const auto s = draw(SubfamilyId::GTW, {{1.5}, 1.0, t(rng), lam}, 50, rng());
    const auto tp = theta_profile(s, SubfamilyId::GTW, {1.5}, 1.0, lam);
    const auto b = mle_theta_bracket(tp);
    ASSERT_TRUE(b.has_value());
    EXPECT_GE(theta_score(tp, b->lower), 0.0) << rep;
    EXPECT_LE(theta_score(tp, b->upper), 0.0) << rep;
  }
}

TEST(ThetaProfile, ScoreAndCurvatureMatchDifferences) {
  const auto s = draw(SubfamilyId::GTWE, {{1.5}, 2.0, 0.9, 0.8}, 100, 13);
  const auto tp = theta_profile(s, SubfamilyId::GTWE, {1.5}, 2.0, 0.8);
  const double th = 1.1, h = 1e-5;
  EXPECT_NEAR(theta_score(tp, th), (theta_loglik(tp, th + h) - theta_loglik(tp, th - h)) / (2 * h), 1e-5);
  EXPECT_NEAR(theta_curvature(tp, th), (theta_score(tp, th + h) - theta_score(tp, th - h)) / (2 * h), 1e-4);
}

TEST(ThetaProfile, ConcaveForPositiveLambda) {
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> l(0.01, 0.99), t(0.05, 8.0);
  const auto s = draw(SubfamilyId::GTWE, {{1.5}, 2.0, 0.9, 0.8}, 100, 14);
  for (int rep = 0; rep < 100; ++rep) {
    const auto tp = theta_profile(s, SubfamilyId::GTWE, {1.5}, 2.0, l(rng));
    const double th = t(rng), h = 1e-3 * th;
    const double d2 = theta_loglik(tp, th + h) - 2 * theta_loglik(tp, th) + theta_loglik(tp, th - h);
    EXPECT_LE(d2 / (h * h), 1e-8);
    EXPECT_LT(theta_curvature(tp, th), 0.0);
  }
}
