#include "certsgd/stopping.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "certsgd/errors.hpp"

namespace certsgd {
namespace {

constexpr double kMaxLog = 709.782712893384;  // log(DBL_MAX)

TauBound from_log(double log_value) {
  if (log_value > kMaxLog) {
    return {std::numeric_limits<double>::infinity(), true};
  }
  return {std::exp(log_value), false};
}

void require_epsilon(double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
}

}  // namespace

double k_alpha(const ConfidenceConfig& config, double g_bound,
               double v_inf_upper) {
  const double l = config.l_alpha();
  const double g2 = g_bound * g_bound;
  const double sig =
      std::max(4.0 * g2 * config.r_x2() * v_inf_upper, 2.0 * (l + 1.0));
  const double c = 6.0 * std::sqrt(constant_c1(sig));
  const double lead =
      c * std::sqrt(sig * (l + std::log(std::log(std::numbers::e + sig))));
  return 0.5 * (lead + config.r_x2() + g2 * v_inf_upper);
}

TauBound tau_bound_poly(double epsilon, double gamma, double eta0,
                        double k_alpha_val) {
  require_epsilon(epsilon);
  if (!(gamma > 0.5 && gamma < 1.0)) {
    throw DomainError("tau_bound_poly requires gamma in (1/2, 1)");
  }
  const double one_minus = 1.0 - gamma;
  return from_log(std::log1p(one_minus * k_alpha_val / (eta0 * epsilon)) /
                  one_minus);
}

TauBound tau_bound_harmonic(double epsilon, double eta0, double k_alpha_val) {
  require_epsilon(epsilon);
  return from_log(k_alpha_val / (eta0 * epsilon));
}

std::uint64_t st_threshold_time(const StepSchedule& schedule,
                                double k_alpha_val, double epsilon) {
  require_epsilon(epsilon);
  if (schedule.kind() == ScheduleKind::kExplicit) {
    throw Unavailable("st_threshold_time needs a polynomial or harmonic "
                      "schedule");
  }
  const double target = k_alpha_val / epsilon;

  // Exact running sum up to the direct-summation cutoff.
  CompensatedSum s;
  for (std::uint64_t t = 1; t <= kDirectSumCutoff; ++t) {
    s += schedule.eta(t);
    if (s.value() >= target) return t;
  }

  // Beyond the cutoff: exponential then binary search on the monotone S_t.
  const double head = s.value();
  auto s_at = [&](std::uint64_t t) {
    return head + block_sum_s(schedule, kDirectSumCutoff + 1, t);
  };
  constexpr std::uint64_t kLimit = std::uint64_t{1} << 63;
  std::uint64_t lo = kDirectSumCutoff;  // S_lo < target
  std::uint64_t hi = lo;
  while (true) {
    if (hi >= kLimit / 2) {
      hi = kLimit - 1;
      if (s_at(hi) < target) {
        throw Infeasible("S_t stays below K_alpha/epsilon for all t < 2^63");
      }
      break;
    }
    hi *= 2;
    if (s_at(hi) >= target) break;
    lo = hi;
  }
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (s_at(mid) >= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

std::optional<double> setup_k_alpha(const Setup& setup) {
  const auto g = setup.noise.gradient_bound(setup.problem);
  if (!g) return std::nullopt;
  // The domination s_t u_obs <= K_alpha needs the declared proxy <= 4 G^2.
  if (setup.confidence.sigma2() > 4.0 * (*g) * (*g) * (1.0 + 1e-12)) {
    return std::nullopt;
  }
  return k_alpha(setup.confidence, *g, setup.confidence.v_inf_upper());
}

std::optional<TauBound> theoretical_tau_bound(const Setup& setup,
                                              double epsilon) {
  const auto k = setup_k_alpha(setup);
  if (!k) return std::nullopt;
  switch (setup.schedule.kind()) {
    case ScheduleKind::kPolynomial:
      return tau_bound_poly(epsilon, setup.schedule.gamma(),
                            setup.schedule.eta0(), *k);
    case ScheduleKind::kHarmonic:
      return tau_bound_harmonic(epsilon, setup.schedule.eta0(), *k);
    case ScheduleKind::kExplicit:
      break;
  }
  return std::nullopt;
}

StopOutcome run_until_certified(const Setup& setup, double epsilon,
                                const Vec& x1, Stream& rng,
                                const RunOptions& options,
                                TraceRecorder* trace) {
  require_epsilon(epsilon);
  if (options.t_cap == 0) throw DomainError("t_cap must be positive");

  std::optional<double> bound;
  if (auto b = theoretical_tau_bound(setup, epsilon)) bound = b->value;

  RunState state = init_run(setup.problem, x1);
  Trace tail;
  const std::uint64_t tail_from =
      options.t_cap > options.tail_rows ? options.t_cap - options.tail_rows + 1
                                        : 1;
  double u = std::numeric_limits<double>::infinity();
  while (state.t < options.t_cap) {
    const StepRecord step =
        sgd_step(state, setup.problem, setup.noise, setup.schedule, rng);
    u = u_obs(state.s_t(), state.v_t(), state.eta2_g2(), setup.confidence);
    const bool stop = u <= epsilon;
    const bool keep_trace = trace && (trace->wants(step.t) || stop);
    if (keep_trace || step.t >= tail_from) {
      TraceRow row = make_trace_row(state, step, setup);
      if (step.t >= tail_from) tail.push_back(row);
      if (keep_trace) trace->push(std::move(row));
    }
    if (stop) {
      StopCertificate cert;
      cert.epsilon = epsilon;
      cert.alpha = setup.confidence.alpha();
      cert.tau = state.t;
      cert.x_bar_tau = averaged_iterate(state);
      cert.u_at_tau = u;
      cert.theoretical_tau_bound = bound;
      if (setup.problem.optimum) {
        cert.f_gap_at_tau = setup.problem.objective(cert.x_bar_tau) -
                            setup.problem.optimum->f_star;
      }
      return cert;
    }
  }
  return CapReached{options.t_cap, u, averaged_iterate(state), bound,
                    std::move(tail)};
}

}  // namespace certsgd
