#include "certsgd/problems.hpp"

#include <cmath>
#include <string>

#include "certsgd/errors.hpp"

namespace certsgd {
namespace {

void require_same_dim(const Vec& a, const Vec& b, const char* what) {
  if (a.size() != b.size()) {
    throw DomainError(std::string("dimension mismatch in ") + what + ": " +
                      std::to_string(a.size()) + " vs " +
                      std::to_string(b.size()));
  }
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

Vec project_box(const Vec& z, const Vec& lo, const Vec& hi) {
  require_same_dim(z, lo, "project_box");
  require_same_dim(z, hi, "project_box");
  return z.cwiseMax(lo).cwiseMin(hi);
}

Vec project_ball(const Vec& z, const Vec& center, double radius) {
  require_same_dim(z, center, "project_ball");
  if (!(radius > 0.0)) throw DomainError("ball radius must be positive");
  const Vec d = z - center;
  const double n = d.norm();
  if (n <= radius) return z;
  return center + (radius / n) * d;
}

Region::Region(Box box) : shape_(std::move(box)) {
  const auto& b = std::get<Box>(shape_);
  require_same_dim(b.lo, b.hi, "box bounds");
  if ((b.lo.array() > b.hi.array()).any()) {
    throw DomainError("box requires lo <= hi coordinatewise");
  }
}

Region::Region(Ball ball) : shape_(std::move(ball)) {
  if (!(std::get<Ball>(shape_).radius > 0.0)) {
    throw DomainError("ball radius must be positive");
  }
}

Vec Region::project(const Vec& z) const {
  return std::visit(
      Overloaded{[&](const Box& b) { return project_box(z, b.lo, b.hi); },
                 [&](const Ball& b) {
                   return project_ball(z, b.center, b.radius);
                 }},
      shape_);
}

bool Region::contains(const Vec& x, double tol) const {
  return std::visit(
      Overloaded{[&](const Box& b) {
                   require_same_dim(x, b.lo, "Region::contains");
                   return ((x.array() >= b.lo.array() - tol) &&
                           (x.array() <= b.hi.array() + tol))
                       .all();
                 },
                 [&](const Ball& b) {
                   require_same_dim(x, b.center, "Region::contains");
                   return (x - b.center).norm() <= b.radius * (1.0 + tol) + tol;
                 }},
      shape_);
}

double Region::diameter() const {
  return std::visit(Overloaded{[](const Box& b) { return (b.hi - b.lo).norm(); },
                               [](const Ball& b) { return 2.0 * b.radius; }},
                    shape_);
}

Eigen::Index Region::dim() const {
  return std::visit(Overloaded{[](const Box& b) { return b.lo.size(); },
                               [](const Ball& b) { return b.center.size(); }},
                    shape_);
}

ConvexProblem make_quadratic(const Vec& curvature, const Vec& anchor,
                             const Region& region, bool with_oracle) {
  require_same_dim(curvature, anchor, "make_quadratic");
  if (curvature.size() != region.dim()) {
    throw DomainError("quadratic dimension does not match region dimension");
  }
  if (curvature.size() == 0) throw DomainError("dimension must be positive");
  if (!(curvature.array() > 0.0).all() || !curvature.allFinite()) {
    throw DomainError("curvature entries must be positive and finite");
  }
  if (!region.contains(anchor, 0.0)) {
    throw DomainError("anchor must lie inside the region");
  }

  // sup_{x in X} |M (x - a)|: separable over a box (attained at a vertex);
  // over a ball bounded by |M (c - a)| + max_i mu_i r, exact for isotropic M.
  const double g_bound = std::visit(
      Overloaded{
          [&](const Box& b) {
            const Vec reach = (b.lo - anchor).cwiseAbs().cwiseMax(
                (b.hi - anchor).cwiseAbs());
            return curvature.cwiseProduct(reach).norm();
          },
          [&](const Ball& b) {
            return curvature.cwiseProduct(b.center - anchor).norm() +
                   curvature.maxCoeff() * b.radius;
          }},
      region.shape());

  ConvexProblem p{
      .dim = curvature.size(),
      .objective =
          [curvature, anchor](const Vec& x) {
            return 0.5 *
                   curvature.dot((x - anchor).cwiseAbs2());
          },
      .gradient =
          [curvature, anchor](const Vec& x) -> Vec {
            return curvature.cwiseProduct(x - anchor);
          },
      .region = region,
      .r_x = region.diameter(),
      .g_bound = g_bound,
      .optimum = std::nullopt,
  };
  if (with_oracle) p.optimum = Optimum{anchor, 0.0};
  return p;
}

NoiseModel::NoiseModel(GaussianNoise g) : kind_(g) {
  if (!(g.sigma >= 0.0) || !std::isfinite(g.sigma)) {
    throw DomainError("gaussian sigma must be nonnegative and finite");
  }
}

NoiseModel::NoiseModel(BoundedUniformNoise b) : kind_(b) {
  if (!(b.nu >= 0.0) || !std::isfinite(b.nu)) {
    throw DomainError("bounded noise radius must be nonnegative and finite");
  }
}

bool NoiseModel::is_bounded() const {
  return std::holds_alternative<BoundedUniformNoise>(kind_);
}

double NoiseModel::variance_proxy(const ConvexProblem& problem) const {
  return std::visit(
      Overloaded{[](const GaussianNoise& g) { return g.sigma * g.sigma; },
                 [&](const BoundedUniformNoise& b) {
                   const double G = problem.g_bound + b.nu;
                   return 4.0 * G * G;
                 }},
      kind_);
}

std::optional<double> NoiseModel::gradient_bound(
    const ConvexProblem& problem) const {
  return std::visit(
      Overloaded{[&](const GaussianNoise& g) -> std::optional<double> {
                   if (g.sigma == 0.0) return problem.g_bound;
                   return std::nullopt;
                 },
                 [&](const BoundedUniformNoise& b) -> std::optional<double> {
                   return problem.g_bound + b.nu;
                 }},
      kind_);
}

Vec NoiseModel::sample(Eigen::Index dim, Stream& rng) const {
  return std::visit(
      Overloaded{[&](const GaussianNoise& g) -> Vec {
                   if (g.sigma == 0.0) return Vec::Zero(dim);
                   Vec xi(dim);
                   for (Eigen::Index i = 0; i < dim; ++i) {
                     xi[i] = g.sigma * rng.normal();
                   }
                   return xi;
                 },
                 [&](const BoundedUniformNoise& b) -> Vec {
                   if (b.nu == 0.0) return Vec::Zero(dim);
                   Vec dir(dim);
                   double n = 0.0;
                   do {
                     for (Eigen::Index i = 0; i < dim; ++i) {
                       dir[i] = rng.normal();
                     }
                     n = dir.norm();
                   } while (n == 0.0);
                   const double r =
                       b.nu * std::pow(rng.uniform(),
                                       1.0 / static_cast<double>(dim));
                   return (r / n) * dir;
                 }},
      kind_);
}

Vec sample_gradient(const ConvexProblem& problem, const NoiseModel& noise,
                    const Vec& x, Stream& rng) {
  return problem.gradient(x) + noise.sample(problem.dim, rng);
}

}  // namespace certsgd
