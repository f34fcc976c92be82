#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "certsgd/config.hpp"
#include "certsgd/harness.hpp"
#include "certsgd/stopping.hpp"
#include "commands.hpp"

namespace py = pybind11;
using namespace certsgd;

namespace {

ExperimentConfig config_from(const std::string& text) {
  return text.empty() ? ExperimentConfig{} : parse_config(nlohmann::json::parse(text));
}

py::dict certify(double epsilon, const std::string& config_json, std::uint64_t seed,
                 std::optional<std::uint64_t> t_cap) {
  ExperimentConfig cfg = config_from(config_json);
  if (t_cap) cfg.t_cap = *t_cap;
  validate(cfg);
  const Setup setup = build_setup(cfg);
  Stream rng(seed);
  const StopOutcome out =
      run_until_certified(setup, epsilon, start_point(cfg, setup.problem), rng,
                          RunOptions{cfg.t_cap});
  py::dict d;
  d["epsilon"] = epsilon;
  d["alpha"] = cfg.alpha;
  if (const auto* c = std::get_if<StopCertificate>(&out)) {
    d["cap_reached"] = false;
    d["tau"] = c->tau;
    d["u_at_tau"] = c->u_at_tau;
    d["x_bar_tau"] = c->x_bar_tau;
    d["f_gap_at_tau"] = c->f_gap_at_tau;
    d["theoretical_bound"] = c->theoretical_tau_bound;
  } else {
    const auto& cap = std::get<CapReached>(out);
    d["cap_reached"] = true;
    d["tau"] = py::none();
    d["t_cap"] = cap.t_cap;
    d["u_at_cap"] = cap.u_at_cap;
    d["x_bar"] = cap.x_bar;
    d["theoretical_bound"] = cap.theoretical_tau_bound;
  }
  return d;
}

py::dict coverage(std::size_t runs, std::uint64_t horizon, double epsilon,
                  const std::string& config_json, std::uint64_t seed, std::size_t threads) {
  const ExperimentConfig cfg = config_from(config_json);
  const Setup setup = build_setup(cfg);
  const auto r = coverage_experiment(setup, runs, horizon, epsilon, seed,
                                     start_point(cfg, setup.problem), threads);
  py::dict d;
  d["n_runs"] = r.n_runs;
  d["horizon"] = r.horizon;
  d["violations_obs"] = r.violations_obs;
  d["violations_adaptive"] = r.violations_adaptive;
  d["ville_exceed"] = r.ville_exceed;
  d["eps_opt_failures"] = r.eps_opt_failures;
  d["capped"] = r.capped;
  d["n_stopped"] = r.stop_stats.n_stopped;
  py::dict checks;
  for (const auto& c : coverage_checks(r, cfg.alpha)) checks[py::str(c.name)] = c.pass;
  d["checks"] = checks;
  return d;
}

}  // namespace

PYBIND11_MODULE(_certsgd, m) {
  m.doc() = "Certified stopping for projected SGD";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<Unavailable>(m, "Unavailable", PyExc_RuntimeError);
  py::register_exception<Infeasible>(m, "Infeasible", PyExc_RuntimeError);

  py::class_<StepSchedule>(m, "StepSchedule")
      .def_static("polynomial", &StepSchedule::polynomial, py::arg("gamma"), py::arg("eta0"))
      .def_static("harmonic", &StepSchedule::harmonic, py::arg("eta0"))
      .def("eta", &StepSchedule::eta, py::arg("t"))
      .def_property_readonly("gamma", &StepSchedule::gamma)
      .def_property_readonly("eta0", &StepSchedule::eta0)
      .def("__repr__", &StepSchedule::describe);

  m.def("cumulative", [](const StepSchedule& s, std::uint64_t t) {
    const auto c = cumulative(s, t);
    return py::make_tuple(c.s_t, c.v_t);
  }, py::arg("schedule"), py::arg("t"));
  m.def("partial_sum_s", &partial_sum_s, py::arg("schedule"), py::arg("t"));
  m.def("v_infinity_upper", &v_infinity_upper, py::arg("schedule"), py::arg("rel_tol") = 1e-10);
  m.def("s_lower_bound", &s_lower_bound, py::arg("schedule"), py::arg("t"));

  m.def("project_box", &project_box, py::arg("z"), py::arg("lo"), py::arg("hi"));
  m.def("project_ball", &project_ball, py::arg("z"), py::arg("center"), py::arg("radius"));

  py::class_<ConfidenceConfig>(m, "ConfidenceConfig")
      .def(py::init<double, double, double, double>(), py::arg("alpha"), py::arg("sigma2"),
           py::arg("r_x2"), py::arg("v_inf_upper"))
      .def_property_readonly("alpha", &ConfidenceConfig::alpha)
      .def_property_readonly("l_alpha", &ConfidenceConfig::l_alpha)
      .def_property_readonly("sigma_inf_eff2", &ConfidenceConfig::sigma_inf_eff2)
      .def_property_readonly("c1", &ConfidenceConfig::c1)
      .def_property_readonly("big_c", &ConfidenceConfig::big_c)
      .def_property_readonly("lambda0", &ConfidenceConfig::lambda0)
      .def_property_readonly("variance_floor", &ConfidenceConfig::variance_floor);

  m.def("constant_c1", &constant_c1, py::arg("sigma_inf_eff2"));
  m.def("u_obs", &u_obs, py::arg("s_t"), py::arg("v_t"), py::arg("sum_eta2_g2"),
        py::arg("config"));
  m.def("u_adaptive", &u_adaptive, py::arg("s_t"), py::arg("sigma2_sum"), py::arg("z_1"),
        py::arg("sum_eta2_g2"), py::arg("config"));
  m.def("log_mixture", [](double xbar, double s2, const ConfidenceConfig& c, std::uint32_t k) {
    return log_mixture(xbar, s2, c, MixtureConfig{k});
  }, py::arg("xbar"), py::arg("sigma2_cum"), py::arg("config"), py::arg("k_max") = 200);
  m.def("grid_index", &grid_index, py::arg("v"), py::arg("config"));

  m.def("k_alpha", &k_alpha, py::arg("config"), py::arg("g_bound"), py::arg("v_inf_upper"));
  m.def("tau_bound_poly", [](double eps, double g, double eta0, double k) {
    return tau_bound_poly(eps, g, eta0, k).value;
  }, py::arg("epsilon"), py::arg("gamma"), py::arg("eta0"), py::arg("k_alpha"));
  m.def("tau_bound_harmonic", [](double eps, double eta0, double k) {
    return tau_bound_harmonic(eps, eta0, k).value;
  }, py::arg("epsilon"), py::arg("eta0"), py::arg("k_alpha"));
  m.def("st_threshold_time", &st_threshold_time, py::arg("schedule"), py::arg("k_alpha"),
        py::arg("epsilon"));

  m.def("certify", &certify, py::arg("epsilon"), py::arg("config_json") = "",
        py::arg("seed") = 0, py::arg("t_cap") = py::none());
  m.def("coverage", &coverage, py::arg("runs"), py::arg("horizon"), py::arg("epsilon"),
        py::arg("config_json") = "", py::arg("seed") = 0, py::arg("threads") = 1);
  m.def("lower_bound_demo", [](double mu, double x1, double eta0, std::uint64_t horizon) {
    const auto r = lower_bound_demo(mu, x1, StepSchedule::harmonic(eta0), horizon, 0.1, 1.0,
                                    horizon);
    return py::make_tuple(r.a_1, r.min_product, r.violations);
  }, py::arg("mu"), py::arg("x1"), py::arg("eta0") = 1.0, py::arg("horizon") = 100000);

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int rc = cli::run(args, out, err);
    return py::make_tuple(rc, out.str(), err.str());
  }, py::arg("args"));
}
