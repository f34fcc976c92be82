#include "certsgd/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "certsgd/errors.hpp"

namespace certsgd {

void parallel_for(std::size_t n, std::size_t threads,
                  const std::function<void(std::size_t)>& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

namespace {

RunRecord coverage_run(const Setup& setup, std::uint64_t horizon,
                       double epsilon, std::uint64_t seed, const Vec& x1) {
  const ConfidenceConfig& conf = setup.confidence;
  const double log_ville = std::log(1.0 / conf.alpha());
  Stream rng(seed);
  RunState state = init_run(setup.problem, x1);
  RunRecord rec;
  rec.seed = seed;
  rec.max_log_mixture = -std::numeric_limits<double>::infinity();
  rec.min_obs_slack = std::numeric_limits<double>::infinity();
  while (state.t < horizon) {
    sgd_step(state, setup.problem, setup.noise, setup.schedule, rng);
    const double s = state.s_t();
    const double g2 = state.eta2_g2();
    const double f_bar = weighted_suboptimality(state);
    const double uo = u_obs(s, state.v_t(), g2, conf);
    const double sigma2_sum = state.sigma2_sum(conf.sigma2());
    const double ua = u_adaptive(s, sigma2_sum, state.z_1(), g2, conf);
    const double lm =
        log_mixture(state.xbar(), sigma2_sum, conf, setup.mixture);

    rec.min_obs_slack = std::min(rec.min_obs_slack, uo - f_bar);
    if (f_bar > uo && !rec.violated_obs) {
      rec.violated_obs = true;
      rec.first_violation_obs = state.t;
    }
    if (f_bar > ua) rec.violated_adaptive = true;
    rec.max_log_mixture = std::max(rec.max_log_mixture, lm);
    if (lm >= log_ville) rec.ville_exceeded = true;

    if (!rec.stopped && uo <= epsilon) {
      rec.stopped = true;
      rec.tau = state.t;
      rec.u_at_tau = uo;
      const Vec xb = averaged_iterate(state);
      rec.f_gap_at_tau =
          setup.problem.objective(xb) - setup.problem.optimum->f_star;
      rec.eps_opt_failure = rec.f_gap_at_tau > epsilon;
    }
  }
  return rec;
}

double quantile(const std::vector<double>& sorted, double q) {
  // Nearest rank.
  const auto n = sorted.size();
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
  rank = std::clamp<std::size_t>(rank, 1, n);
  return sorted[rank - 1];
}

}  // namespace

CoverageReport coverage_experiment(const Setup& setup, std::size_t n_runs,
                                   std::uint64_t horizon, double epsilon,
                                   std::uint64_t base_seed, const Vec& x1,
                                   std::size_t threads) {
  if (!setup.problem.has_oracle()) {
    throw Unavailable("coverage_experiment requires a problem with a known "
                      "optimum");
  }
  if (n_runs == 0) throw DomainError("n_runs must be at least 1");
  if (horizon == 0) throw DomainError("horizon must be at least 1");
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
  init_run(setup.problem, x1);  // validates the start point up front

  CoverageReport report;
  report.n_runs = n_runs;
  report.horizon = horizon;
  report.alpha = setup.confidence.alpha();
  report.epsilon = epsilon;
  report.base_seed = base_seed;
  report.per_seed.resize(n_runs);
  parallel_for(n_runs, threads, [&](std::size_t i) {
    report.per_seed[i] = coverage_run(setup, horizon, epsilon, base_seed + i, x1);
  });
  std::sort(report.per_seed.begin(), report.per_seed.end(),
            [](const RunRecord& a, const RunRecord& b) { return a.seed < b.seed; });

  std::vector<double> taus;
  for (const auto& r : report.per_seed) {
    report.violations_obs += r.violated_obs;
    report.violations_adaptive += r.violated_adaptive;
    report.ville_exceed += r.ville_exceeded;
    report.eps_opt_failures += r.eps_opt_failure;
    if (r.stopped) {
      taus.push_back(static_cast<double>(r.tau));
    } else {
      ++report.capped;
    }
  }
  std::sort(taus.begin(), taus.end());
  report.stop_stats.n_stopped = taus.size();
  if (!taus.empty()) {
    double sum = 0.0;
    for (double t : taus) sum += t;
    report.stop_stats.mean = sum / static_cast<double>(taus.size());
    report.stop_stats.max = taus.back();
    report.stop_stats.q50 = quantile(taus, 0.5);
    report.stop_stats.q90 = quantile(taus, 0.9);
    report.stop_stats.q99 = quantile(taus, 0.99);
  }
  return report;
}

double binomial_margin(double alpha, std::size_t n) {
  return alpha + 3.0 * std::sqrt(alpha * (1.0 - alpha) / static_cast<double>(n));
}

std::vector<StatCheck> coverage_checks(const CoverageReport& report,
                                       double check_alpha) {
  std::vector<StatCheck> out;
  auto frequency = [&](std::string name, std::size_t count, std::size_t n) {
    StatCheck c{std::move(name), count, n, 0.0, true};
    if (n > 0) {
      c.threshold = binomial_margin(check_alpha, n);
      c.pass = static_cast<double>(count) / static_cast<double>(n) <= c.threshold;
    }
    out.push_back(std::move(c));
  };
  frequency("coverage_observable", report.violations_obs, report.n_runs);
  frequency("coverage_adaptive", report.violations_adaptive, report.n_runs);
  frequency("ville_frequency", report.ville_exceed, report.n_runs);
  frequency("stopped_eps_optimality", report.eps_opt_failures,
            report.stop_stats.n_stopped);

  std::size_t over = 0;
  for (const auto& r : report.per_seed) {
    if (r.stopped && !(r.u_at_tau <= report.epsilon)) ++over;
  }
  out.push_back({"u_at_tau_le_epsilon", over, report.stop_stats.n_stopped, 0.0,
                 over == 0});
  out.push_back({"observable_dominates_adaptive", report.violations_obs,
                 report.violations_adaptive, 0.0,
                 report.violations_obs <= report.violations_adaptive});
  out.push_back({"eps_failures_explained", report.eps_opt_failures,
                 report.violations_obs + report.capped, 0.0,
                 report.eps_opt_failures <=
                     report.violations_obs + report.capped});
  return out;
}

RateReport rate_check(const Trace& trace, double k_alpha_val, double rel_tol) {
  RateReport out;
  double prev = -std::numeric_limits<double>::infinity();
  for (const auto& row : trace) {
    const double p = row.s_t * row.u_obs;
    ++out.n_checked;
    out.max_product = out.n_checked == 1 ? p : std::max(out.max_product, p);
    if (p > k_alpha_val * (1.0 + rel_tol)) ++out.violations;
    if (p < prev * (1.0 - 1e-14)) out.nondecreasing = false;
    prev = p;
  }
  return out;
}

LowerBoundReport lower_bound_demo(double mu, double x1,
                                  const StepSchedule& schedule,
                                  std::uint64_t horizon, double alpha,
                                  double sigma2, std::uint64_t trace_stride,
                                  double rel_tol) {
  if (!(mu > 0.0 && mu < 1.0)) throw DomainError("mu must lie in (0, 1)");
  if (!std::isfinite(x1)) throw DomainError("x1 must be finite");
  if (horizon == 0) throw DomainError("horizon must be at least 1");
  const double h = std::max(2.0, std::abs(x1));
  Region region(Box{Vec::Constant(1, -h), Vec::Constant(1, h)});
  Setup setup = make_setup(make_quadratic(Vec::Constant(1, mu), Vec::Zero(1), region),
                           NoiseModel::none(), schedule, alpha, 200, 1e-10, sigma2);

  LowerBoundReport out;
  out.horizon = horizon;
  out.min_product = std::numeric_limits<double>::infinity();
  TraceRecorder recorder(trace_stride);
  Stream rng(0);
  RunState state = init_run(setup.problem, Vec::Constant(1, x1));
  double prev_a = 0.0;
  while (state.t < horizon) {
    const StepRecord step =
        sgd_step(state, setup.problem, setup.noise, setup.schedule, rng);
    const double a_t = state.oracle->cum_weighted_gap.value();
    if (state.t == 1) out.a_1 = a_t;
    if (a_t < prev_a) out.a_monotone = false;
    prev_a = a_t;
    const double product =
        state.s_t() * u_obs(state.s_t(), state.v_t(), state.eta2_g2(),
                            setup.confidence);
    out.min_product = std::min(out.min_product, product);
    if (a_t > product * (1.0 + rel_tol)) ++out.violations;
    if (recorder.wants(state.t)) {
      recorder.push(make_trace_row(state, step, setup));
    }
  }
  out.trace = recorder.take();
  return out;
}

DriftReport drift_check(const Setup& setup, const RunState& snapshot,
                        std::size_t n_resamples, std::uint64_t base_seed) {
  if (n_resamples == 0) throw DomainError("drift_check needs a nonempty sample");
  if (!setup.problem.has_oracle() || !snapshot.oracle) {
    throw Unavailable("drift_check requires a known optimum");
  }
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t i = 0; i < n_resamples; ++i) {
    RunState copy = snapshot;
    Stream rng(base_seed, i + 1);
    const double x =
        sgd_step(copy, setup.problem, setup.noise, setup.schedule, rng).x_incr;
    const double delta = x - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (x - mean);
  }
  DriftReport out;
  out.n = n_resamples;
  out.mean = mean;
  const double var = n_resamples > 1 ? m2 / static_cast<double>(n_resamples - 1) : 0.0;
  out.std_error = std::sqrt(var / static_cast<double>(n_resamples));
  out.pass = out.mean <= 5.0 * out.std_error;
  return out;
}

}  // namespace certsgd
