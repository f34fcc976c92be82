#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "certsgd/errors.hpp"
#include "certsgd/stopping.hpp"

using namespace certsgd;

namespace {

Vec v(std::initializer_list<double> xs) {
  Vec out(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) out[i++] = x;
  return out;
}

ConvexProblem line_problem() {
  return make_quadratic(v({0.5}), v({0}), Box{v({-2}), v({2})});
}

certsgd::Setup bounded_setup(const StepSchedule& sched, double nu = 0.5) {
  return make_setup(make_quadratic(v({1.0, 0.5}), v({0.2, 0.1}), Ball{v({0, 0}), 1.0}),
                    NoiseModel(BoundedUniformNoise{nu}), sched, 0.1);
}

double kalpha_reference(double alpha, double g, double r_x2, double v_inf) {
  const double e = std::numbers::e;
  const double l = std::log(2.0 / alpha);
  const double sig = std::max(4 * g * g * r_x2 * v_inf, 2 * (l + 1));
  const double c1 = std::max(1.0, std::log(std::log(sig) + 1) / std::log(std::log(e + 1)));
  return 0.5 * (6 * std::sqrt(c1) * std::sqrt(sig * (l + std::log(std::log(e + sig)))) + r_x2 +
                g * g * v_inf);
}

}  // namespace

TEST(KAlpha, ZeroGradientLimit) {
  const ConfidenceConfig c(0.1, 1.0, 16.0, 1.0);
  const double l = std::log(20.0);
  const double thr = 2 * (l + 1);
  const double c1 = std::max(1.0, std::log(std::log(thr) + 1) / std::log(std::log(std::numbers::e + 1)));
  const double expected =
      0.5 * (6 * std::sqrt(c1) * std::sqrt(thr * (l + std::log(std::log(std::numbers::e + thr)))) + 16.0);
  EXPECT_NEAR(k_alpha(c, 0.0, 1.0), expected, 1e-12 * expected);
  EXPECT_NEAR(k_alpha(c, 1e-9, 1.0), expected, 1e-9 * expected);
}

TEST(KAlpha, HarmonicFormula) {
  const double v_inf = std::numbers::pi * std::numbers::pi / 6;
  const ConfidenceConfig c(0.1, 1.0, 16.0, v_inf);
  const double ref = kalpha_reference(0.1, 1.0, 16.0, v_inf);
  EXPECT_NEAR(k_alpha(c, 1.0, v_inf), ref, 1e-12 * ref);
}

TEST(TauBound, Polynomial) {
  EXPECT_NEAR(tau_bound_poly(0.25, 0.75, 1.0, 1.0).value, 16.0, 1e-12);
  EXPECT_NEAR(tau_bound_poly(1e300, 0.75, 1.0, 1.0).value, 1.0, 1e-12);
  const double a = tau_bound_poly(1e-6, 0.75, 1.0, 1.0).value;
  const double b = tau_bound_poly(5e-7, 0.75, 1.0, 1.0).value;
  EXPECT_NEAR(b / a, 16.0, 1e-3);
  EXPECT_THROW(tau_bound_poly(0.0, 0.75, 1.0, 1.0), DomainError);
  EXPECT_THROW(tau_bound_poly(0.1, 1.0, 1.0, 1.0), DomainError);
}

TEST(TauBound, Harmonic) {
  EXPECT_NEAR(tau_bound_harmonic(1.0, 1.0, 1.0).value, std::numbers::e, 1e-14);
  EXPECT_NEAR(tau_bound_harmonic(1.0, 1.0, 2.0).value, std::exp(2.0), 1e-13);
  const TauBound big = tau_bound_harmonic(0.001, 1.0, 1.0);
  EXPECT_TRUE(big.overflow);
  EXPECT_TRUE(std::isinf(big.value));
  EXPECT_FALSE(tau_bound_harmonic(1.0, 1.0, 1.0).overflow);
  EXPECT_TRUE(tau_bound_poly(1e-300, 0.9, 1.0, 1.0).overflow);
}

TEST(StThreshold, Examples) {
  const auto h = StepSchedule::harmonic(1.0);
  EXPECT_EQ(st_threshold_time(h, partial_sum_s(h, 5), 1.0), 5u);
  const auto p = StepSchedule::polynomial(0.75, 1.0);
  std::uint64_t scan = 0;
  double s = 0;
  while (s < 4.0) s += p.eta(++scan);
  EXPECT_EQ(st_threshold_time(p, 4.0, 1.0), scan);
  EXPECT_LE(scan, 16u);
  EXPECT_EQ(st_threshold_time(p, 0.5, 1.0), 1u);
  EXPECT_EQ(st_threshold_time(StepSchedule::harmonic(2.0), 2.0, 1.0), 1u);
  EXPECT_THROW(st_threshold_time(StepSchedule::explicit_values({1}, 1.0), 1.0, 1.0),
               Unavailable);
  EXPECT_THROW(st_threshold_time(h, 1e6, 1.0), Infeasible);
}

TEST(StThreshold, BeyondDirectCutoff) {
  const auto p = StepSchedule::polynomial(0.9, 1.0);
  const double target = 60.0;
  const std::uint64_t t = st_threshold_time(p, target, 1.0);
  EXPECT_GT(t, kDirectSumCutoff);
  EXPECT_GE(partial_sum_s(p, t), target);
  EXPECT_LT(partial_sum_s(p, t - 1), target);
}

TEST(StThreshold, BelowClosedFormBounds) {
  for (double g : {0.55, 0.6, 0.75, 0.9}) {
    for (double eta0 : {0.3, 1.0, 2.5}) {
      for (double k : {0.5, 3.0, 20.0}) {
        for (double eps : {10.0, 1.0, 0.3}) {
          const auto sched = StepSchedule::polynomial(g, eta0);
          const auto b = tau_bound_poly(eps, g, eta0, k);
          if (b.value > 1e12) continue;
          EXPECT_LE(static_cast<double>(st_threshold_time(sched, k, eps)), std::ceil(b.value));
        }
      }
    }
  }
  for (double eta0 : {0.3, 1.0, 2.5}) {
    for (double ratio : {0.5, 2.0, 8.0, 15.0}) {
      const auto b = tau_bound_harmonic(1.0, eta0, ratio * eta0);
      EXPECT_LE(static_cast<double>(st_threshold_time(StepSchedule::harmonic(eta0), ratio * eta0, 1.0)),
                std::ceil(b.value));
    }
  }
}

TEST(Run, ImmediateStop) {
  const auto setup = make_setup(line_problem(), NoiseModel(GaussianNoise{1.0}),
                                StepSchedule::harmonic(1.0), 0.1);
  Stream rng(0);
  const auto out = run_until_certified(setup, 1e6, v({1.0}), rng, RunOptions{});
  const auto* cert = std::get_if<StopCertificate>(&out);
  ASSERT_NE(cert, nullptr);
  EXPECT_EQ(cert->tau, 1u);
  EXPECT_EQ(cert->x_bar_tau, v({1.0}));
  ASSERT_TRUE(cert->f_gap_at_tau);
  EXPECT_DOUBLE_EQ(*cert->f_gap_at_tau, 0.25);
}

TEST(Run, CapReached) {
  const auto setup = make_setup(line_problem(), NoiseModel(GaussianNoise{1.0}),
                                StepSchedule::harmonic(1.0), 0.1);
  Stream rng(0);
  const auto out = run_until_certified(setup, 1e-3, v({1.0}), rng, RunOptions{1000, 8});
  const auto* cap = std::get_if<CapReached>(&out);
  ASSERT_NE(cap, nullptr);
  EXPECT_EQ(cap->t_cap, 1000u);
  EXPECT_GT(cap->u_at_cap, 1e-3);
  EXPECT_EQ(cap->tail.size(), 8u);
  EXPECT_EQ(cap->tail.back().t, 1000u);
}

TEST(Run, TraceLevelCorrectnessAndNonStrictThreshold) {
  const auto setup = bounded_setup(StepSchedule::polynomial(0.75, 1.0));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Stream probe(seed);
    TraceRecorder all(1);
    run_until_certified(setup, 1e-9, v({-0.7, 0.7}), probe, RunOptions{50}, &all);
    ASSERT_EQ(all.rows().size(), 50u);
    // Target the first value that undercuts every earlier one.
    const auto& rows = all.rows();
    std::size_t pick = 30;
    double best = rows[0].u_obs;
    for (std::size_t i = 0; i < 30; ++i) best = std::min(best, rows[i].u_obs);
    while (pick < rows.size() && rows[pick].u_obs >= best) ++pick;
    if (pick == rows.size()) continue;
    const double eps = rows[pick].u_obs;
    Stream rng(seed);
    TraceRecorder rec(1);
    const auto out = run_until_certified(setup, eps, v({-0.7, 0.7}), rng, RunOptions{1000}, &rec);
    const auto& cert = std::get<StopCertificate>(out);
    EXPECT_EQ(cert.tau, rows[pick].t);
    EXPECT_EQ(cert.u_at_tau, eps);
    for (const auto& r : rec.rows()) {
      if (r.t < cert.tau) EXPECT_GT(r.u_obs, eps);
    }
  }
}

TEST(Run, TauBelowTheoreticalBound) {
  const auto sched = StepSchedule::polynomial(0.75, 1.0);
  const auto setup = bounded_setup(sched);
  const double k = *setup_k_alpha(setup);
  const double eps = 2.0 * k / partial_sum_s(sched, 10000);
  const auto bound = theoretical_tau_bound(setup, eps);
  ASSERT_TRUE(bound);
  const std::uint64_t st = st_threshold_time(sched, k, eps);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Stream rng(seed);
    const auto out = run_until_certified(setup, eps, v({-0.7, 0.7}), rng, RunOptions{100000});
    const auto& cert = std::get<StopCertificate>(out);
    EXPECT_LE(static_cast<double>(cert.tau), std::ceil(bound->value));
    EXPECT_LE(cert.tau, st);
    EXPECT_LE(cert.u_at_tau, eps);
    ASSERT_TRUE(cert.theoretical_tau_bound);
    EXPECT_EQ(*cert.theoretical_tau_bound, bound->value);
  }
}

TEST(Run, KAlphaAvailability) {
  const auto gauss = make_setup(line_problem(), NoiseModel(GaussianNoise{1.0}),
                                StepSchedule::harmonic(1.0), 0.1);
  EXPECT_FALSE(setup_k_alpha(gauss));
  EXPECT_FALSE(theoretical_tau_bound(gauss, 1.0));
  const auto b = bounded_setup(StepSchedule::harmonic(1.0));
  ASSERT_TRUE(setup_k_alpha(b));
  const double g = b.problem.g_bound + 0.5;
  EXPECT_NEAR(b.problem.g_bound, std::hypot(0.2, 0.05) + 1.0, 1e-15);
  EXPECT_NEAR(*setup_k_alpha(b),
              kalpha_reference(0.1, g, 4.0, b.confidence.v_inf_upper()), 1e-12 * *setup_k_alpha(b));
}
