#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <variant>

#include "certsgd/rng.hpp"

namespace certsgd {

using Vec = Eigen::VectorXd;

Vec project_box(const Vec& z, const Vec& lo, const Vec& hi);
Vec project_ball(const Vec& z, const Vec& center, double radius);

struct Box {
  Vec lo;
  Vec hi;
};

struct Ball {
  Vec center;
  double radius = 1.0;
};

// Closed convex feasible set with an exact Euclidean projection.
class Region {
 public:
  Region(Box box);
  Region(Ball ball);

  Vec project(const Vec& z) const;
  bool contains(const Vec& x, double tol = 1e-12) const;
  double diameter() const;
  Eigen::Index dim() const;

  const std::variant<Box, Ball>& shape() const { return shape_; }

 private:
  std::variant<Box, Ball> shape_;
};

struct Optimum {
  Vec x_star;
  double f_star = 0.0;
};

// A convex objective over a compact region. g_bound is sup_{x in X} |grad f|.
struct ConvexProblem {
  Eigen::Index dim = 0;
  std::function<double(const Vec&)> objective;
  std::function<Vec(const Vec&)> gradient;
  Region region;
  double r_x = 0.0;
  double g_bound = 0.0;
  std::optional<Optimum> optimum;

  Vec project(const Vec& z) const { return region.project(z); }
  bool has_oracle() const { return optimum.has_value(); }
};

// f(x) = 1/2 sum_i mu_i (x_i - a_i)^2 over `region`. The anchor must be
// feasible; it is then the exact minimizer with f* = 0. Pass with_oracle =
// false to build the same problem without exposing the optimum.
ConvexProblem make_quadratic(const Vec& curvature, const Vec& anchor,
                             const Region& region, bool with_oracle = true);

struct GaussianNoise {
  double sigma = 0.0;
};

// xi uniform on the ball of radius nu.
struct BoundedUniformNoise {
  double nu = 0.0;
};

class NoiseModel {
 public:
  NoiseModel(GaussianNoise g);
  NoiseModel(BoundedUniformNoise b);

  static NoiseModel none() { return NoiseModel(GaussianNoise{0.0}); }

  // Sub-Gaussian variance proxy induced on the given problem: sigma^2 for
  // Gaussian noise, 4 G^2 with G = g_bound + nu for bounded noise.
  double variance_proxy(const ConvexProblem& problem) const;

  // Almost-sure bound on |g_t|, when one exists.
  std::optional<double> gradient_bound(const ConvexProblem& problem) const;

  Vec sample(Eigen::Index dim, Stream& rng) const;

  bool is_bounded() const;
  const std::variant<GaussianNoise, BoundedUniformNoise>& kind() const {
    return kind_;
  }

 private:
  std::variant<GaussianNoise, BoundedUniformNoise> kind_;
};

// grad f(x) + xi.
Vec sample_gradient(const ConvexProblem& problem, const NoiseModel& noise,
                    const Vec& x, Stream& rng);

}  // namespace certsgd
