#include "certsgd/engine.hpp"

#include <cmath>
#include <string>

#include "certsgd/errors.hpp"

namespace certsgd {

void CompensatedVec::add_scaled(double w, const Vec& x) {
  for (Eigen::Index i = 0; i < sum_.size(); ++i) {
    const double y = w * x[i];
    const double t = sum_[i] + y;
    if (std::abs(sum_[i]) >= std::abs(y)) {
      comp_[i] += (sum_[i] - t) + y;
    } else {
      comp_[i] += (y - t) + sum_[i];
    }
    sum_[i] = t;
  }
}

double RunState::sigma2_sum(double sigma2) const {
  if (!oracle) throw Unavailable("Sigma_t^2 requires a known optimum");
  return sigma2 * oracle->eta2_z_sum.value();
}

double RunState::xbar() const {
  if (!oracle) throw Unavailable("X_bar requires a known optimum");
  return oracle->xbar_sum.value();
}

double RunState::z_1() const {
  if (!oracle) throw Unavailable("Z_1 requires a known optimum");
  return oracle->z_1;
}

RunState init_run(const ConvexProblem& problem, const Vec& x1) {
  if (x1.size() != problem.dim) {
    throw DomainError("start point has dimension " + std::to_string(x1.size()) +
                      ", problem has " + std::to_string(problem.dim));
  }
  if (!x1.allFinite() || !problem.region.contains(x1)) {
    throw DomainError("start point x1 is not feasible");
  }
  RunState state;
  state.x = x1;
  state.weighted_sum_x = CompensatedVec(problem.dim);
  if (problem.optimum) {
    OracleState o;
    o.z_1 = (x1 - problem.optimum->x_star).squaredNorm();
    o.z_next = o.z_1;
    state.oracle = o;
  }
  return state;
}

StepRecord sgd_step(RunState& state, const ConvexProblem& problem,
                    const NoiseModel& noise, const StepSchedule& schedule,
                    Stream& rng) {
  const std::uint64_t t = state.t + 1;
  const double eta = schedule.eta(t);
  const Vec g = sample_gradient(problem, noise, state.x, rng);
  if (!g.allFinite()) {
    throw NumericalFailure("nonfinite stochastic gradient at t = " +
                           std::to_string(t));
  }
  const double g_norm2 = g.squaredNorm();
  Vec x_next = problem.project(state.x - eta * g);
  if (!x_next.allFinite()) {
    throw NumericalFailure("nonfinite iterate at t = " + std::to_string(t));
  }

  StepRecord rec{.t = t, .eta = eta, .g_norm2 = g_norm2};
  if (state.oracle) {
    OracleState& o = *state.oracle;
    const double f_t = problem.objective(state.x);
    if (!std::isfinite(f_t)) {
      throw NumericalFailure("nonfinite objective at t = " + std::to_string(t));
    }
    const Vec& x_star = problem.optimum->x_star;
    const double z_t = o.z_next;
    const double z_next = (x_next - x_star).squaredNorm();
    const double gap = f_t - problem.optimum->f_star;
    rec.z_t = z_t;
    rec.f_gap = gap;
    rec.x_incr = 2.0 * eta * gap - (z_t - z_next) - eta * eta * g_norm2;
    o.cum_weighted_gap += eta * gap;
    o.xbar_sum += rec.x_incr;
    o.eta2_z_sum += eta * eta * z_t;
    o.z_next = z_next;
  }

  state.weighted_sum_x.add_scaled(eta, state.x);
  state.s += eta;
  state.v += eta * eta;
  state.sum_eta2_g2 += eta * eta * g_norm2;
  state.x = std::move(x_next);
  state.t = t;
  return rec;
}

Vec averaged_iterate(const RunState& state) {
  if (state.t == 0) throw Unavailable("averaged iterate of an empty run");
  return state.weighted_sum_x.value() / state.s_t();
}

double weighted_suboptimality(const RunState& state) {
  if (!state.oracle) {
    throw Unavailable("weighted suboptimality requires a known optimum");
  }
  if (state.t == 0) throw Unavailable("weighted suboptimality of an empty run");
  return state.oracle->cum_weighted_gap.value() / state.s_t();
}

}  // namespace certsgd
