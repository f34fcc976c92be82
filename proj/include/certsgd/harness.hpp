#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "certsgd/engine.hpp"
#include "certsgd/setup.hpp"
#include "certsgd/trace.hpp"

namespace certsgd {

// Per-trajectory outcome of a coverage run.
struct RunRecord {
  std::uint64_t seed = 0;
  bool violated_obs = false;       // F_bar_t > U_obs_t for some t <= horizon
  std::uint64_t first_violation_obs = 0;
  bool violated_adaptive = false;  // F_bar_t > U_t for some t <= horizon
  bool ville_exceeded = false;     // log mixture >= log(1/alpha) somewhere
  double max_log_mixture = 0.0;
  double min_obs_slack = 0.0;      // min_t (U_obs_t - F_bar_t)
  bool stopped = false;            // u_obs <= epsilon before the horizon
  std::uint64_t tau = 0;
  double u_at_tau = 0.0;
  double f_gap_at_tau = 0.0;
  bool eps_opt_failure = false;    // f(x_bar_tau) - f* > epsilon
};

struct StopStats {
  std::size_t n_stopped = 0;
  double mean = 0.0;
  double max = 0.0;
  double q50 = 0.0;
  double q90 = 0.0;
  double q99 = 0.0;
};

// Coverage is checked on t <= horizon only ("horizon-truncated").
struct CoverageReport {
  std::size_t n_runs = 0;
  std::uint64_t horizon = 0;
  double alpha = 0.0;
  double epsilon = 0.0;
  std::uint64_t base_seed = 0;
  std::size_t violations_obs = 0;
  std::size_t violations_adaptive = 0;
  std::size_t ville_exceed = 0;
  std::size_t eps_opt_failures = 0;
  std::size_t capped = 0;
  StopStats stop_stats;
  std::vector<RunRecord> per_seed;
};

// Runs n_runs trajectories with seeds base_seed + i on `threads` workers.
// Output does not depend on the thread count. Requires a known optimum.
CoverageReport coverage_experiment(const Setup& setup, std::size_t n_runs,
                                   std::uint64_t horizon, double epsilon,
                                   std::uint64_t base_seed, const Vec& x1,
                                   std::size_t threads = 1);

// One binomial-margin check: count / denominator <= a + 3 sqrt(a(1-a)/n).
struct StatCheck {
  std::string name;
  std::size_t count = 0;
  std::size_t denominator = 0;
  double threshold = 0.0;
  bool pass = true;
};

double binomial_margin(double alpha, std::size_t n);

// Checks for coverage (both boundaries), Ville frequency and stopped-iterate
// optimality at the declared level check_alpha, plus the exact checks
// u_at_tau <= epsilon on every stopped run and the counter orderings.
std::vector<StatCheck> coverage_checks(const CoverageReport& report,
                                       double check_alpha);

struct RateReport {
  std::size_t n_checked = 0;
  double max_product = 0.0;   // max_t s_t u_obs_t
  std::size_t violations = 0; // s_t u_obs_t > k_alpha (1 + rel_tol)
  bool nondecreasing = true;  // s_t u_obs_t nondecreasing along the trace
};

RateReport rate_check(const Trace& trace, double k_alpha_val,
                      double rel_tol = 1e-9);

struct LowerBoundReport {
  double a_1 = 0.0;            // eta_1 (mu/2) x_1^2
  double min_product = 0.0;    // min_t s_t u_obs_t
  std::uint64_t horizon = 0;
  std::size_t violations = 0;  // A_t > s_t u_obs_t (1 + rel_tol)
  bool a_monotone = true;
  Trace trace;
};

// Deterministic 1-d run of f(x) = mu x^2 / 2 on [-h, h], h = max(2, |x1|),
// with zero noise and declared proxy sigma2.
LowerBoundReport lower_bound_demo(double mu, double x1,
                                  const StepSchedule& schedule,
                                  std::uint64_t horizon, double alpha = 0.1,
                                  double sigma2 = 1.0,
                                  std::uint64_t trace_stride = 1,
                                  double rel_tol = 1e-12);

struct DriftReport {
  std::size_t n = 0;
  double mean = 0.0;
  double std_error = 0.0;
  bool pass = false;  // mean <= 5 stderr
};

// Resamples one-step continuations from `snapshot` and summarizes X_t.
DriftReport drift_check(const Setup& setup, const RunState& snapshot,
                        std::size_t n_resamples, std::uint64_t base_seed);

// Runs fn(i) for i in [0, n) on `threads` workers.
void parallel_for(std::size_t n, std::size_t threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace certsgd
