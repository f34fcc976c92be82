#include <gtest/gtest.h>

#include <cmath>

#include "certsgd/errors.hpp"
#include "certsgd/problems.hpp"

using namespace certsgd;

namespace {

Vec v(std::initializer_list<double> xs) {
  Vec out(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) out[i++] = x;
  return out;
}

Vec random_vec(Stream& rng, Eigen::Index d, double scale) {
  Vec out(d);
  for (Eigen::Index i = 0; i < d; ++i) out[i] = scale * (2.0 * rng.uniform() - 1.0);
  return out;
}

}  // namespace

TEST(ProjectBox, Examples) {
  EXPECT_EQ(project_box(v({3, -3}), v({-1, -1}), v({1, 1})), v({1, -1}));
  EXPECT_EQ(project_box(v({0.2, 0.5}), v({0, 0}), v({1, 1})), v({0.2, 0.5}));
  EXPECT_EQ(project_box(v({5}), v({-2}), v({2})), v({2}));
  EXPECT_THROW(project_box(v({1, 2}), v({0}), v({1})), DomainError);
}

TEST(ProjectBall, Examples) {
  const Vec p = project_ball(v({3, 4}), v({0, 0}), 1.0);
  EXPECT_NEAR(p[0], 0.6, 1e-15);
  EXPECT_NEAR(p[1], 0.8, 1e-15);
  EXPECT_EQ(project_ball(v({0.1, 0}), v({0, 0}), 1.0), v({0.1, 0}));
  const Vec q = project_ball(v({0, 0}), v({1, 1}), 0.5);
  const double off = 0.5 / std::sqrt(2.0);
  EXPECT_NEAR(q[0], 1.0 - off, 1e-15);
  EXPECT_NEAR(q[1], 1.0 - off, 1e-15);
  EXPECT_THROW(project_ball(v({1, 2, 3}), v({0, 0}), 1.0), DomainError);
}

TEST(Projection, IdempotentAndNonexpansive) {
  Stream rng(11);
  const Region regions[] = {Region(Box{v({-1, 0, -2}), v({1, 0.5, 3})}),
                            Region(Ball{v({0.3, -0.2, 1.0}), 0.7})};
  for (const auto& r : regions) {
    for (int i = 0; i < 2000; ++i) {
      const Vec z1 = random_vec(rng, 3, 5.0);
      const Vec z2 = random_vec(rng, 3, 5.0);
      const Vec p1 = r.project(z1);
      EXPECT_LE((r.project(p1) - p1).norm(), 1e-15);
      EXPECT_TRUE(r.contains(p1));
      EXPECT_LE((p1 - r.project(z2)).norm(), (z1 - z2).norm() * (1 + 1e-15));
    }
  }
}

TEST(Quadratic, OneDimensionalBox) {
  const auto p = make_quadratic(v({0.5}), v({0}), Box{v({-2}), v({2})});
  ASSERT_TRUE(p.optimum);
  EXPECT_EQ(p.optimum->x_star, v({0}));
  EXPECT_EQ(p.optimum->f_star, 0.0);
  EXPECT_DOUBLE_EQ(p.r_x, 4.0);
  EXPECT_DOUBLE_EQ(p.g_bound, 1.0);
  EXPECT_DOUBLE_EQ(p.objective(v({1})), 0.25);
  EXPECT_DOUBLE_EQ(p.gradient(v({1}))[0], 0.5);
}

TEST(Quadratic, UnitBall) {
  const auto p = make_quadratic(v({1, 1}), v({0, 0}), Ball{v({0, 0}), 1.0});
  EXPECT_DOUBLE_EQ(p.r_x, 2.0);
  EXPECT_DOUBLE_EQ(p.g_bound, 1.0);
}

TEST(Quadratic, BoxGradientBoundByVertexEnumeration) {
  const Vec mu = v({1, 2, 3});
  const Vec a = v({0.1, 0.1, 0.1});
  const auto p = make_quadratic(mu, a, Box{v({-1, -1, -1}), v({1, 1, 1})});
  double best = 0.0;
  for (int mask = 0; mask < 8; ++mask) {
    Vec x(3);
    for (int i = 0; i < 3; ++i) x[i] = (mask >> i) & 1 ? 1.0 : -1.0;
    best = std::max(best, mu.cwiseProduct(x - a).norm());
  }
  EXPECT_NEAR(p.g_bound, best, 1e-14);
  EXPECT_NEAR(best, std::sqrt(1.1 * 1.1 + 4 * 1.1 * 1.1 + 9 * 1.1 * 1.1), 1e-14);
}

TEST(Quadratic, InvariantsOnSampledPoints) {
  Stream rng(3);
  const auto p = make_quadratic(v({2.0, 0.3}), v({0.4, -0.5}), Ball{v({0.1, 0}), 1.2});
  const Vec& xs = p.optimum->x_star;
  EXPECT_EQ(p.project(xs), xs);
  for (int i = 0; i < 5000; ++i) {
    const Vec x = p.project(random_vec(rng, 2, 3.0));
    EXPECT_GE(p.objective(x), p.optimum->f_star);
    EXPECT_LE((x - xs).norm(), p.r_x);
    EXPECT_LE(p.gradient(x).norm(), p.g_bound * (1 + 1e-12));
  }
}

TEST(Quadratic, RejectsInfeasibleAnchorAndBadCurvature) {
  EXPECT_THROW(make_quadratic(v({1}), v({3}), Box{v({-2}), v({2})}), DomainError);
  EXPECT_THROW(make_quadratic(v({-1}), v({0}), Box{v({-2}), v({2})}), DomainError);
  EXPECT_THROW(make_quadratic(v({1, 1}), v({0}), Box{v({-2}), v({2})}), DomainError);
}

TEST(Quadratic, WithoutOracle) {
  const auto p = make_quadratic(v({1}), v({0}), Box{v({-1}), v({1})}, false);
  EXPECT_FALSE(p.has_oracle());
}

TEST(Noise, ZeroNoiseReturnsExactGradient) {
  const auto p = make_quadratic(v({0.5}), v({0}), Box{v({-2}), v({2})});
  Stream rng(1);
  EXPECT_EQ(sample_gradient(p, NoiseModel::none(), v({1}), rng)[0], 0.5);
}

TEST(Noise, GaussianMeanMatchesGradient) {
  const auto p = make_quadratic(v({1, 2}), v({0.1, 0.2}), Ball{v({0, 0}), 1.0});
  const NoiseModel noise(GaussianNoise{1.0});
  Stream rng(77);
  const Vec x = v({0.5, -0.3});
  const int n = 100000;
  Vec sum = Vec::Zero(2);
  for (int i = 0; i < n; ++i) sum += sample_gradient(p, noise, x, rng);
  const Vec mean = sum / n;
  const Vec g = p.gradient(x);
  for (int i = 0; i < 2; ++i) EXPECT_LE(std::abs(mean[i] - g[i]), 4.0 / std::sqrt(n));
  EXPECT_EQ(noise.variance_proxy(p), 1.0);
  EXPECT_FALSE(noise.gradient_bound(p));
}

TEST(Noise, BoundedUniformRespectsGradientBound) {
  const auto p = make_quadratic(v({1, 1}), v({0, 0}), Ball{v({0, 0}), 1.0});
  const NoiseModel noise(BoundedUniformNoise{0.3});
  Stream rng(5);
  const Vec x = v({0.6, 0.8});
  ASSERT_NEAR(p.gradient(x).norm(), 1.0, 1e-15);
  for (int i = 0; i < 20000; ++i) {
    EXPECT_LE(sample_gradient(p, noise, x, rng).norm(), 1.3 + 1e-12);
  }
  EXPECT_NEAR(*noise.gradient_bound(p), 1.3, 1e-15);
  EXPECT_NEAR(noise.variance_proxy(p), 4.0 * 1.3 * 1.3, 1e-14);
}

TEST(Noise, BoundedUniformIsCenteredAndInsideBall) {
  const NoiseModel noise(BoundedUniformNoise{2.0});
  Stream rng(8);
  Vec sum = Vec::Zero(3);
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const Vec xi = noise.sample(3, rng);
    EXPECT_LE(xi.norm(), 2.0);
    sum += xi;
  }
  // Each coordinate has variance nu^2 / (d + 2).
  const double sd = 2.0 / std::sqrt(5.0);
  for (int i = 0; i < 3; ++i) EXPECT_LE(std::abs(sum[i] / n), 5.0 * sd / std::sqrt(n));
}

TEST(Stream, DeterministicAndDistinct) {
  Stream a(42, 1), b(42, 1), c(42, 2), d(43, 1);
  const double xa = a.normal();
  EXPECT_EQ(xa, b.normal());
  EXPECT_NE(xa, c.normal());
  EXPECT_NE(xa, d.normal());
}
