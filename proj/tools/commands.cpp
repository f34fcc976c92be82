#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "certsgd/config.hpp"
#include "certsgd/harness.hpp"
#include "certsgd/stopping.hpp"
#include "json.hpp"

namespace certsgd::cli {
namespace {

using nlohmann::json;

// Global flags accepted by every command.
struct GlobalFlags {
  std::string config;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

void add_global_flags(CLI::App& app, GlobalFlags& g) {
  app.add_option("--config", g.config, "Experiment config (JSON)");
  app.add_option("--seed", g.seed, "Base random seed");
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);
}

// Returns -1 when parsing succeeded, else the exit code to return.
int parse(CLI::App& app, const std::vector<std::string>& args, std::ostream& out,
          std::ostream& err) {
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << app.get_name() << ": " << e.what() << "\n";
    return kConfigError;
  }
  return -1;
}

ExperimentConfig load_or_default(const std::string& path) {
  return path.empty() ? ExperimentConfig{} : load_config(path);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << text;
}

json number_or_null(const std::optional<double>& v) {
  if (v && std::isfinite(*v)) return *v;
  return nullptr;
}

std::string render_vec(const Vec& v) {
  std::ostringstream os;
  os << '[';
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) os << ", ";
    os << format_double(v[i]);
  }
  os << ']';
  return os.str();
}

json vec_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

}  // namespace

int cmd_certify(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err) {
  CLI::App app{"Run projected SGD until the observable bound certifies "
               "epsilon-optimality",
               "certify"};
  GlobalFlags g;
  add_global_flags(app, g);
  double epsilon = 0.0;
  std::optional<double> alpha;
  std::optional<std::uint64_t> t_cap;
  std::string trace_out;
  std::string summary_out;
  app.add_option("--epsilon", epsilon, "Target accuracy")->required();
  app.add_option("--alpha", alpha, "Confidence level, overrides the config");
  app.add_option("--t-cap", t_cap, "Iteration cap, overrides the config");
  app.add_option("--trace-out", trace_out, "Trace CSV path");
  app.add_option("--summary-out", summary_out, "Summary JSON path");
  if (int rc = parse(app, args, out, err); rc >= 0) return rc;

  try {
    if (!(epsilon > 0.0)) throw ConfigError("--epsilon: must be positive");
    ExperimentConfig cfg = load_or_default(g.config);
    if (alpha) cfg.alpha = *alpha;
    if (t_cap) cfg.t_cap = *t_cap;
    validate(cfg);
    const Setup setup = build_setup(cfg);
    const Vec x1 = start_point(cfg, setup.problem);

    Stream rng(g.seed);
    TraceRecorder recorder(cfg.trace_stride);
    const StopOutcome outcome =
        run_until_certified(setup, epsilon, x1, rng, RunOptions{cfg.t_cap},
                            trace_out.empty() ? nullptr : &recorder);
    const auto bound = theoretical_tau_bound(setup, epsilon);

    json summary;
    summary["epsilon"] = epsilon;
    summary["alpha"] = cfg.alpha;
    summary["theoretical_bound"] =
        bound ? number_or_null(bound->value) : json(nullptr);
    summary["theoretical_bound_overflow"] = bound ? bound->overflow : false;
    int rc = kOk;
    if (const auto* cert = std::get_if<StopCertificate>(&outcome)) {
      summary["tau"] = cert->tau;
      summary["u_at_tau"] = cert->u_at_tau;
      summary["f_gap_at_tau"] = number_or_null(cert->f_gap_at_tau);
      summary["cap_reached"] = false;
      summary["x_bar_tau"] = vec_json(cert->x_bar_tau);
      out << "certified: tau=" << cert->tau
          << " u_obs=" << format_double(cert->u_at_tau)
          << " <= epsilon=" << format_double(epsilon)
          << " at alpha=" << format_double(cfg.alpha)
          << " x_bar=" << render_vec(cert->x_bar_tau) << "\n";
    } else {
      const auto& cap = std::get<CapReached>(outcome);
      summary["tau"] = nullptr;
      summary["u_at_tau"] = nullptr;
      summary["f_gap_at_tau"] = nullptr;
      summary["cap_reached"] = true;
      summary["t_cap"] = cap.t_cap;
      summary["u_at_cap"] = cap.u_at_cap;
      out << "cap reached: t=" << cap.t_cap
          << " u_obs=" << format_double(cap.u_at_cap)
          << " > epsilon=" << format_double(epsilon) << "\n";
      rc = kCapReached;
    }
    if (!summary_out.empty()) write_text(summary_out, summary.dump(2) + "\n");
    if (!trace_out.empty()) write_trace_csv(trace_out, recorder.rows());
    return rc;
  } catch (const std::exception& e) {
    err << "certify: " << e.what() << "\n";
    return kConfigError;
  }
}

namespace {

json report_json(const CoverageReport& r, const std::vector<StatCheck>& checks,
                 double check_alpha) {
  json j;
  j["coverage_statistic"] = "horizon-truncated";
  j["n_runs"] = r.n_runs;
  j["horizon"] = r.horizon;
  j["alpha"] = r.alpha;
  j["check_alpha"] = check_alpha;
  j["epsilon"] = r.epsilon;
  j["base_seed"] = r.base_seed;
  j["violations_obs"] = r.violations_obs;
  j["violations_adaptive"] = r.violations_adaptive;
  j["ville_exceed"] = r.ville_exceed;
  j["eps_opt_failures"] = r.eps_opt_failures;
  j["capped"] = r.capped;
  j["stop_stats"] = {{"n_stopped", r.stop_stats.n_stopped},
                     {"mean", r.stop_stats.mean},
                     {"max", r.stop_stats.max},
                     {"q50", r.stop_stats.q50},
                     {"q90", r.stop_stats.q90},
                     {"q99", r.stop_stats.q99}};
  json cj = json::array();
  for (const auto& c : checks) {
    cj.push_back({{"name", c.name},
                  {"count", c.count},
                  {"denominator", c.denominator},
                  {"threshold", c.threshold},
                  {"pass", c.pass}});
  }
  j["checks"] = cj;
  json runs = json::array();
  for (const auto& p : r.per_seed) {
    runs.push_back({{"seed", p.seed},
                    {"violated_obs", p.violated_obs},
                    {"first_violation_obs", p.first_violation_obs},
                    {"violated_adaptive", p.violated_adaptive},
                    {"ville_exceeded", p.ville_exceeded},
                    {"max_log_mixture", p.max_log_mixture},
                    {"min_obs_slack", p.min_obs_slack},
                    {"stopped", p.stopped},
                    {"tau", p.tau},
                    {"u_at_tau", p.u_at_tau},
                    {"f_gap_at_tau", p.f_gap_at_tau},
                    {"eps_opt_failure", p.eps_opt_failure}});
  }
  j["per_seed"] = runs;
  return j;
}

void write_per_run_csv(const std::string& path, const CoverageReport& r) {
  std::ostringstream os;
  os << "seed,violated_obs,first_violation_obs,violated_adaptive,"
        "ville_exceeded,max_log_mixture,min_obs_slack,stopped,tau,u_at_tau,"
        "f_gap_at_tau,eps_opt_failure\n";
  for (const auto& p : r.per_seed) {
    os << p.seed << ',' << p.violated_obs << ',' << p.first_violation_obs << ','
       << p.violated_adaptive << ',' << p.ville_exceeded << ','
       << format_double(p.max_log_mixture) << ','
       << format_double(p.min_obs_slack) << ',' << p.stopped << ',' << p.tau
       << ',' << format_double(p.u_at_tau) << ','
       << format_double(p.f_gap_at_tau) << ',' << p.eps_opt_failure << '\n';
  }
  write_text(path, os.str());
}

}  // namespace

int cmd_coverage(const std::vector<std::string>& args, std::ostream& out,
                 std::ostream& err) {
  CLI::App app{"Monte Carlo validation of coverage, Ville frequency and "
               "stopped-iterate optimality",
               "coverage"};
  GlobalFlags g;
  add_global_flags(app, g);
  std::size_t runs = 500;
  std::uint64_t horizon = 10000;
  std::optional<double> epsilon;
  std::optional<double> alpha;
  std::optional<double> check_alpha;
  double f_star_shift = 0.0;
  std::string report_out;
  std::string per_run_out;
  app.add_option("--runs", runs, "Number of trajectories")->check(CLI::PositiveNumber);
  app.add_option("--horizon", horizon, "Horizon T")->check(CLI::PositiveNumber);
  app.add_option("--epsilon", epsilon,
                 "Stopping accuracy (default 2 K_alpha / S_T)");
  app.add_option("--alpha", alpha, "Confidence level, overrides the config");
  app.add_option("--check-alpha", check_alpha,
                 "Level declared to the binomial checks (default: alpha)");
  app.add_option("--f-star-shift", f_star_shift,
                 "Lower the declared optimal value by this amount (diagnostic)");
  app.add_option("--report-out", report_out, "Report JSON path");
  app.add_option("--per-run-out", per_run_out, "Per-run CSV path");
  if (int rc = parse(app, args, out, err); rc >= 0) return rc;

  try {
    ExperimentConfig cfg = load_or_default(g.config);
    if (alpha) cfg.alpha = *alpha;
    validate(cfg);
    if (!cfg.oracle) {
      throw ConfigError("$.oracle: coverage needs a problem with a known optimum");
    }
    Setup setup = build_setup(cfg);
    if (f_star_shift != 0.0) setup.problem.optimum->f_star -= f_star_shift;
    const Vec x1 = start_point(cfg, setup.problem);

    double eps = 0.0;
    if (epsilon) {
      eps = *epsilon;
    } else {
      const double G = setup.noise.gradient_bound(setup.problem)
                           .value_or(setup.problem.g_bound);
      const double k = k_alpha(setup.confidence, G, setup.confidence.v_inf_upper());
      eps = 2.0 * k / partial_sum_s(setup.schedule, horizon);
    }
    const double level = check_alpha.value_or(cfg.alpha);
    if (!(level > 0.0 && level < 1.0)) {
      throw ConfigError("--check-alpha: must lie in (0, 1)");
    }

    const CoverageReport report =
        coverage_experiment(setup, runs, horizon, eps, g.seed, x1, g.threads);
    const auto checks = coverage_checks(report, level);
    if (!report_out.empty()) {
      write_text(report_out, report_json(report, checks, level).dump(2) + "\n");
    }
    if (!per_run_out.empty()) write_per_run_csv(per_run_out, report);

    bool all_pass = true;
    for (const auto& c : checks) {
      out << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.count << "/"
          << c.denominator;
      if (c.threshold > 0.0) out << " (threshold " << format_double(c.threshold) << ")";
      out << "\n";
      all_pass = all_pass && c.pass;
    }
    out << "coverage (horizon-truncated): runs=" << report.n_runs
        << " horizon=" << report.horizon << " epsilon=" << format_double(eps)
        << " stopped=" << report.stop_stats.n_stopped << "\n";
    return all_pass ? kOk : kCheckFailed;
  } catch (const std::exception& e) {
    err << "coverage: " << e.what() << "\n";
    return kConfigError;
  }
}

int cmd_verify_lemmas(const std::vector<std::string>& args, std::ostream& out,
                      std::ostream& err) {
  CLI::App app{"Numeric sweeps of the supporting inequalities", "verify-lemmas"};
  GlobalFlags g;
  add_global_flags(app, g);
  std::optional<double> alpha;
  std::vector<double> gammas{0.6, 0.75, 0.9};
  std::optional<double> extra_gamma;
  std::uint64_t tmax = 10000;
  std::size_t points = 1000;
  std::uint32_t kmax = 200;
  std::vector<double> sigma_tops{10.0, 1e3, 1e6};
  app.add_option("--alpha", alpha, "Single confidence level (default: 0.01, 0.05, 0.1, 0.5)");
  app.add_option("--gamma", extra_gamma, "Additional polynomial exponent");
  app.add_option("--tmax", tmax, "Largest time in the partial-sum sweeps")
      ->check(CLI::PositiveNumber);
  app.add_option("--points", points, "Grid points per sweep")->check(CLI::PositiveNumber);
  app.add_option("--kmax", kmax, "Largest grid index in the boundary sweep");
  app.add_option("--sigma-inf", sigma_tops,
                 "Upper ends of the variance-proxy range to sweep");
  if (int rc = parse(app, args, out, err); rc >= 0) return rc;

  try {
    std::vector<double> alphas{0.01, 0.05, 0.1, 0.5};
    if (alpha) alphas = {*alpha};
    for (double a : alphas) check_alpha_domain(a);
    if (extra_gamma) {
      if (!(*extra_gamma > 0.5 && *extra_gamma < 1.0)) {
        throw DomainError("--gamma must lie in (1/2, 1)");
      }
      gammas.push_back(*extra_gamma);
    }

    std::size_t violations = 0;
    auto line = [&](const std::string& name, std::size_t checked, std::size_t bad) {
      out << (bad == 0 ? "PASS " : "FAIL ") << name << ": " << checked
          << " points, " << bad << " violations\n";
      violations += bad;
    };

    for (double a : alphas) {
      const double l = std::log(2.0 / a);
      for (double top : sigma_tops) {
        const ConfidenceConfig conf(a, top, 1.0, 1.0);
        const double v_top = conf.sigma_inf_eff2();
        const auto loglog = log_spaced(l * (1.0 + 1e-9), v_top, points);
        const auto threshold = log_spaced(conf.variance_floor(),
                                          1e3 * conf.variance_floor(), points);
        std::ostringstream tag;
        tag << "alpha=" << a << " sigma_inf_eff2=" << format_double(v_top);

        // c1 comes from the largest grid value, so the two sweeps run apart.
        const LemmaReport lem = verify_appendix_lemmas({a}, loglog);
        line("log-log bound " + tag.str(), lem.checked, lem.violations.size());
        const LemmaReport thr = verify_appendix_lemmas({a}, threshold);
        line("explicit threshold " + tag.str(), thr.checked, thr.violations.size());

        const LemmaReport dom = verify_boundary_dominance(conf, kmax, points);
        line("boundary dominance and grid index " + tag.str(), dom.checked,
             dom.violations.size());
      }
    }

    const auto times = log_spaced_times(tmax, points);
    for (double gm : gammas) {
      const auto bad = verify_sum_lower_bounds(StepSchedule::polynomial(gm, 1.0), times);
      std::ostringstream tag;
      tag << "polynomial partial sums gamma=" << gm;
      line(tag.str(), times.size(), bad.size());
    }
    const auto bad_h = verify_sum_lower_bounds(StepSchedule::harmonic(1.0), times);
    line("harmonic partial sums", times.size(), bad_h.size());

    out << (violations == 0 ? "all sweeps passed" : "violations found") << "\n";
    return violations == 0 ? kOk : kCheckFailed;
  } catch (const std::exception& e) {
    err << "verify-lemmas: " << e.what() << "\n";
    return kConfigError;
  }
}

int cmd_demo_lower_bound(const std::vector<std::string>& args,
                         std::ostream& out, std::ostream& err) {
  CLI::App app{"Deterministic one-dimensional run showing S_t U_t >= A_1",
               "demo-lower-bound"};
  GlobalFlags g;
  add_global_flags(app, g);
  double mu = 0.5;
  double x1 = 1.0;
  double eta0 = 1.0;
  std::optional<double> gamma;
  std::uint64_t horizon = 100000;
  double alpha = 0.1;
  double sigma2 = 1.0;
  std::uint64_t stride = 1;
  std::string trace_out;
  app.add_option("--mu", mu, "Curvature in (0, 1)");
  app.add_option("--x1", x1, "Start point");
  app.add_option("--eta0", eta0, "Base stepsize");
  app.add_option("--gamma", gamma, "Polynomial exponent (default: harmonic)");
  app.add_option("--horizon", horizon, "Number of steps")->check(CLI::PositiveNumber);
  app.add_option("--alpha", alpha, "Confidence level");
  app.add_option("--sigma2", sigma2, "Declared variance proxy");
  app.add_option("--trace-stride", stride, "Keep every n-th trace row")
      ->check(CLI::PositiveNumber);
  app.add_option("--trace-out", trace_out, "Trace CSV path");
  if (int rc = parse(app, args, out, err); rc >= 0) return rc;

  try {
    const StepSchedule schedule = gamma ? StepSchedule::polynomial(*gamma, eta0)
                                        : StepSchedule::harmonic(eta0);
    const LowerBoundReport r =
        lower_bound_demo(mu, x1, schedule, horizon, alpha, sigma2, stride);
    out << "A_1 = " << format_double(r.a_1) << "\n";
    out << "min_t S_t U_obs_t = " << format_double(r.min_product)
        << " over t <= " << r.horizon << "\n";
    out << "A_t <= S_t U_obs_t violations: " << r.violations
        << (r.a_monotone ? "" : " (A_t not monotone)") << "\n";
    if (!trace_out.empty()) write_trace_csv(trace_out, r.trace);
    return r.violations == 0 && r.a_monotone ? kOk : kCheckFailed;
  } catch (const std::exception& e) {
    err << "demo-lower-bound: " << e.what() << "\n";
    return kConfigError;
  }
}

int run(const std::vector<std::string>& argv, std::ostream& out,
        std::ostream& err) {
  static const std::vector<std::string> kCommands{
      "certify", "coverage", "verify-lemmas", "demo-lower-bound"};
  auto it = std::find_first_of(argv.begin(), argv.end(), kCommands.begin(),
                               kCommands.end());
  if (it == argv.end()) {
    err << "usage: certsgd <certify|coverage|verify-lemmas|demo-lower-bound> "
           "[--config FILE] [--seed N] [--threads N] [options]\n";
    return kConfigError;
  }
  const std::string name = *it;
  std::vector<std::string> rest(argv.begin(), it);
  rest.insert(rest.end(), it + 1, argv.end());
  if (name == "certify") return cmd_certify(rest, out, err);
  if (name == "coverage") return cmd_coverage(rest, out, err);
  if (name == "verify-lemmas") return cmd_verify_lemmas(rest, out, err);
  return cmd_demo_lower_bound(rest, out, err);
}

}  // namespace certsgd::cli
