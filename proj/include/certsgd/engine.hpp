#pragma once

#include <cstdint>
#include <optional>

#include "certsgd/problems.hpp"
#include "certsgd/rng.hpp"
#include "certsgd/schedules.hpp"
#include "certsgd/summation.hpp"

namespace certsgd {

// Elementwise compensated accumulation of vectors.
class CompensatedVec {
 public:
  CompensatedVec() = default;
  explicit CompensatedVec(Eigen::Index dim)
      : sum_(Vec::Zero(dim)), comp_(Vec::Zero(dim)) {}

  void add_scaled(double w, const Vec& x);
  Vec value() const { return sum_ + comp_; }

 private:
  Vec sum_;
  Vec comp_;
};

// Diagnostics that need the exact optimum.
struct OracleState {
  double z_1 = 0.0;     // |x_1 - x*|^2
  double z_next = 0.0;  // |x_{t+1} - x*|^2
  CompensatedSum cum_weighted_gap;  // sum_s eta_s (f(x_s) - f*)
  CompensatedSum xbar_sum;          // sum_s X_s
  CompensatedSum eta2_z_sum;        // sum_s eta_s^2 Z_s
};

// State after t completed steps. `x` is x_{t+1}, the point the next step
// evaluates.
struct RunState {
  std::uint64_t t = 0;
  Vec x;
  CompensatedVec weighted_sum_x;
  CompensatedSum s;
  CompensatedSum v;
  CompensatedSum sum_eta2_g2;
  std::optional<OracleState> oracle;

  double s_t() const { return s.value(); }
  double v_t() const { return v.value(); }
  double eta2_g2() const { return sum_eta2_g2.value(); }

  // Sigma_t^2 = sigma2 * sum_s eta_s^2 Z_s.
  double sigma2_sum(double sigma2) const;
  double xbar() const;
  double z_1() const;
};

// Per-step values not retained in the state.
struct StepRecord {
  std::uint64_t t = 0;
  double eta = 0.0;
  double g_norm2 = 0.0;
  double z_t = 0.0;     // oracle only
  double f_gap = 0.0;   // oracle only: f(x_t) - f*
  double x_incr = 0.0;  // oracle only: X_t
};

RunState init_run(const ConvexProblem& problem, const Vec& x1);

// One projected step x_{t+1} = P(x_t - eta_t g_t). Throws NumericalFailure on
// nonfinite gradient, objective, or iterate.
StepRecord sgd_step(RunState& state, const ConvexProblem& problem,
                    const NoiseModel& noise, const StepSchedule& schedule,
                    Stream& rng);

// x_bar_t = (1/S_t) sum_s eta_s x_s.
Vec averaged_iterate(const RunState& state);

// F_bar_t = (1/S_t) sum_s eta_s (f(x_s) - f*).
double weighted_suboptimality(const RunState& state);

}  // namespace certsgd
