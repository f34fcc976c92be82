#pragma once

#include <cstdint>
#include <optional>
#include <variant>

#include "certsgd/engine.hpp"
#include "certsgd/setup.hpp"
#include "certsgd/trace.hpp"

namespace certsgd {

// Certified stop: u_obs(tau) <= epsilon and u_obs(t) > epsilon for t < tau.
struct StopCertificate {
  double epsilon = 0.0;
  double alpha = 0.0;
  std::uint64_t tau = 0;
  Vec x_bar_tau;
  double u_at_tau = 0.0;
  std::optional<double> theoretical_tau_bound;
  std::optional<double> f_gap_at_tau;  // oracle only: f(x_bar_tau) - f*
};

struct CapReached {
  std::uint64_t t_cap = 0;
  double u_at_cap = 0.0;
  Vec x_bar;
  std::optional<double> theoretical_tau_bound;
  Trace tail;
};

using StopOutcome = std::variant<StopCertificate, CapReached>;

struct TauBound {
  double value = 0.0;
  bool overflow = false;  // value is +infinity
};

// K_alpha under |g_t| <= G, with the variance proxy fixed at 4 G^2:
//   sig = max{4 G^2 R_x^2 V_inf, 2 (L_alpha + 1)}
//   K   = (C(sig) sqrt(sig (L_alpha + log log(e + sig))) + R_x^2 + G^2 V_inf)/2
double k_alpha(const ConfidenceConfig& config, double g_bound,
               double v_inf_upper);

// (1 + (1 - gamma) K / (eta0 eps))^{1/(1-gamma)}
TauBound tau_bound_poly(double epsilon, double gamma, double eta0,
                        double k_alpha_val);

// exp(K / (eta0 eps))
TauBound tau_bound_harmonic(double epsilon, double eta0, double k_alpha_val);

// Smallest t with S_t >= K / eps. Throws Infeasible when no t < 2^63 works.
std::uint64_t st_threshold_time(const StepSchedule& schedule,
                                double k_alpha_val, double epsilon);

// Closed-form bound on tau_eps when the noise has an almost-sure gradient
// bound G, the declared proxy does not exceed 4 G^2, and the schedule is
// polynomial or harmonic.
std::optional<TauBound> theoretical_tau_bound(const Setup& setup,
                                              double epsilon);

// K_alpha for the setup's almost-sure gradient bound, when one exists.
std::optional<double> setup_k_alpha(const Setup& setup);

struct RunOptions {
  std::uint64_t t_cap = 100000;
  std::size_t tail_rows = 16;
};

// Runs projected SGD and stops at the first t with u_obs(t) <= epsilon.
// Recorded rows go to `trace` when given.
StopOutcome run_until_certified(const Setup& setup, double epsilon,
                                const Vec& x1, Stream& rng,
                                const RunOptions& options,
                                TraceRecorder* trace = nullptr);

}  // namespace certsgd
