#include "certsgd/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace certsgd {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError(path + ": " + msg);
}

void reject_unknown(const json& obj, const std::string& path,
                    const std::set<std::string>& allowed) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) fail(path + "." + key, "unknown key");
  }
}

double get_number(const json& obj, const std::string& key,
                  const std::string& path) {
  const auto& v = obj.at(key);
  if (!v.is_number()) fail(path + "." + key, "expected a number");
  return v.get<double>();
}

std::uint64_t get_count(const json& obj, const std::string& key,
                        const std::string& path) {
  const auto& v = obj.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    fail(path + "." + key, "expected a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

std::string get_string(const json& obj, const std::string& key,
                       const std::string& path) {
  const auto& v = obj.at(key);
  if (!v.is_string()) fail(path + "." + key, "expected a string");
  return v.get<std::string>();
}

std::vector<double> get_vector(const json& obj, const std::string& key,
                               const std::string& path) {
  const auto& v = obj.at(key);
  if (!v.is_array()) fail(path + "." + key, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) fail(path + "." + key, "expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

void require_key(const json& obj, const std::string& key,
                 const std::string& path) {
  if (!obj.contains(key)) fail(path + "." + key, "missing required key");
}

Vec to_vec(const std::vector<double>& v) {
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void check_dim(const std::vector<double>& v, int dim, const std::string& path) {
  if (static_cast<int>(v.size()) != dim) {
    fail(path, "expected " + std::to_string(dim) + " entries, got " +
                   std::to_string(v.size()));
  }
}

Region make_region(const ExperimentConfig& c) {
  if (c.region_kind == "box") return Region(Box{to_vec(c.lo), to_vec(c.hi)});
  return Region(Ball{to_vec(c.center), c.radius});
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  const std::string root = "$";
  reject_unknown(j, root,
                 {"problem", "dim", "mu", "anchor", "region", "oracle", "noise",
                  "schedule", "confidence", "run"});
  ExperimentConfig c;
  require_key(j, "problem", root);
  c.problem = get_string(j, "problem", root);
  require_key(j, "dim", root);
  c.dim = static_cast<int>(get_count(j, "dim", root));
  require_key(j, "mu", root);
  c.mu = get_vector(j, "mu", root);
  c.anchor = j.contains("anchor") ? get_vector(j, "anchor", root)
                                  : std::vector<double>(c.dim, 0.0);
  if (j.contains("oracle")) {
    if (!j["oracle"].is_boolean()) fail("$.oracle", "expected a boolean");
    c.oracle = j["oracle"].get<bool>();
  }

  require_key(j, "region", root);
  {
    const std::string path = "$.region";
    const json& r = j["region"];
    if (!r.is_object()) fail(path, "expected an object");
    require_key(r, "kind", path);
    c.region_kind = get_string(r, "kind", path);
    if (c.region_kind == "box") {
      reject_unknown(r, path, {"kind", "lo", "hi"});
      require_key(r, "lo", path);
      require_key(r, "hi", path);
      c.lo = get_vector(r, "lo", path);
      c.hi = get_vector(r, "hi", path);
      c.center.clear();
    } else if (c.region_kind == "ball") {
      reject_unknown(r, path, {"kind", "center", "radius"});
      require_key(r, "radius", path);
      c.center = r.contains("center") ? get_vector(r, "center", path)
                                      : std::vector<double>(c.dim, 0.0);
      c.radius = get_number(r, "radius", path);
    } else {
      fail(path + ".kind", "expected \"box\" or \"ball\"");
    }
  }

  if (j.contains("noise")) {
    const std::string path = "$.noise";
    const json& n = j["noise"];
    if (!n.is_object()) fail(path, "expected an object");
    require_key(n, "kind", path);
    c.noise_kind = get_string(n, "kind", path);
    if (c.noise_kind == "gaussian") {
      reject_unknown(n, path, {"kind", "sigma"});
      require_key(n, "sigma", path);
      c.sigma = get_number(n, "sigma", path);
    } else if (c.noise_kind == "bounded_uniform") {
      reject_unknown(n, path, {"kind", "nu"});
      require_key(n, "nu", path);
      c.nu = get_number(n, "nu", path);
    } else {
      fail(path + ".kind", "expected \"gaussian\" or \"bounded_uniform\"");
    }
  }

  if (j.contains("schedule")) {
    const std::string path = "$.schedule";
    const json& s = j["schedule"];
    if (!s.is_object()) fail(path, "expected an object");
    require_key(s, "kind", path);
    c.schedule_kind = get_string(s, "kind", path);
    if (c.schedule_kind == "polynomial") {
      reject_unknown(s, path, {"kind", "gamma", "eta0"});
      require_key(s, "gamma", path);
      c.gamma = get_number(s, "gamma", path);
    } else if (c.schedule_kind == "harmonic") {
      reject_unknown(s, path, {"kind", "eta0"});
    } else {
      fail(path + ".kind", "expected \"polynomial\" or \"harmonic\"");
    }
    if (s.contains("eta0")) c.eta0 = get_number(s, "eta0", path);
  }

  if (j.contains("confidence")) {
    const std::string path = "$.confidence";
    const json& k = j["confidence"];
    reject_unknown(k, path, {"alpha", "mixture_kmax", "v_inf_rel_tol", "sigma2"});
    if (k.contains("alpha")) c.alpha = get_number(k, "alpha", path);
    if (k.contains("mixture_kmax")) {
      c.mixture_kmax = static_cast<std::uint32_t>(get_count(k, "mixture_kmax", path));
    }
    if (k.contains("v_inf_rel_tol")) {
      c.v_inf_rel_tol = get_number(k, "v_inf_rel_tol", path);
    }
    if (k.contains("sigma2")) c.sigma2 = get_number(k, "sigma2", path);
  }

  if (j.contains("run")) {
    const std::string path = "$.run";
    const json& r = j["run"];
    reject_unknown(r, path, {"x1", "t_cap", "trace_stride"});
    if (r.contains("x1")) c.x1 = get_vector(r, "x1", path);
    if (r.contains("t_cap")) c.t_cap = get_count(r, "t_cap", path);
    if (r.contains("trace_stride")) {
      c.trace_stride = get_count(r, "trace_stride", path);
    }
  }

  validate(c);
  return c;
}

void validate(const ExperimentConfig& c) {
  if (c.problem != "quadratic") fail("$.problem", "expected \"quadratic\"");
  if (c.dim < 1) fail("$.dim", "must be at least 1");
  check_dim(c.mu, c.dim, "$.mu");
  check_dim(c.anchor, c.dim, "$.anchor");
  for (double m : c.mu) {
    if (!(m > 0.0) || !std::isfinite(m)) fail("$.mu", "entries must be positive");
  }
  if (c.region_kind == "box") {
    check_dim(c.lo, c.dim, "$.region.lo");
    check_dim(c.hi, c.dim, "$.region.hi");
    for (int i = 0; i < c.dim; ++i) {
      if (!(c.lo[i] <= c.hi[i])) fail("$.region", "requires lo <= hi");
    }
  } else if (c.region_kind == "ball") {
    check_dim(c.center, c.dim, "$.region.center");
    if (!(c.radius > 0.0)) fail("$.region.radius", "must be positive");
  } else {
    fail("$.region.kind", "expected \"box\" or \"ball\"");
  }
  if (!make_region(c).contains(to_vec(c.anchor), 0.0)) {
    fail("$.anchor", "must lie inside the region");
  }
  if (c.noise_kind == "gaussian") {
    if (!(c.sigma >= 0.0)) fail("$.noise.sigma", "must be nonnegative");
  } else if (c.noise_kind == "bounded_uniform") {
    if (!(c.nu >= 0.0)) fail("$.noise.nu", "must be nonnegative");
  } else {
    fail("$.noise.kind", "expected \"gaussian\" or \"bounded_uniform\"");
  }
  if (c.schedule_kind == "polynomial") {
    if (!(c.gamma > 0.5 && c.gamma < 1.0)) {
      fail("$.schedule.gamma", "must lie in (1/2, 1)");
    }
  } else if (c.schedule_kind != "harmonic") {
    fail("$.schedule.kind", "expected \"polynomial\" or \"harmonic\"");
  }
  if (!(c.eta0 > 0.0) || !std::isfinite(c.eta0)) {
    fail("$.schedule.eta0", "must be positive");
  }
  if (!(c.alpha > 0.0 && c.alpha < 2.0 / std::exp(1.0))) {
    fail("$.confidence.alpha", "alpha must lie in (0, 2/e)");
  }
  if (!(c.v_inf_rel_tol > 0.0 && c.v_inf_rel_tol < 1.0)) {
    fail("$.confidence.v_inf_rel_tol", "must lie in (0, 1)");
  }
  if (c.sigma2 && !(*c.sigma2 > 0.0)) {
    fail("$.confidence.sigma2", "must be positive");
  }
  if (c.t_cap < 1) fail("$.run.t_cap", "must be at least 1");
  if (c.trace_stride < 1) fail("$.run.trace_stride", "must be at least 1");
  if (c.x1) {
    check_dim(*c.x1, c.dim, "$.run.x1");
    if (!make_region(c).contains(to_vec(*c.x1))) {
      fail("$.run.x1", "start point is not feasible");
    }
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_config(j);
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["problem"] = c.problem;
  j["dim"] = c.dim;
  j["mu"] = c.mu;
  j["anchor"] = c.anchor;
  if (c.region_kind == "box") {
    j["region"] = {{"kind", "box"}, {"lo", c.lo}, {"hi", c.hi}};
  } else {
    j["region"] = {{"kind", "ball"}, {"center", c.center}, {"radius", c.radius}};
  }
  j["oracle"] = c.oracle;
  if (c.noise_kind == "gaussian") {
    j["noise"] = {{"kind", "gaussian"}, {"sigma", c.sigma}};
  } else {
    j["noise"] = {{"kind", "bounded_uniform"}, {"nu", c.nu}};
  }
  if (c.schedule_kind == "polynomial") {
    j["schedule"] = {{"kind", "polynomial"}, {"gamma", c.gamma}, {"eta0", c.eta0}};
  } else {
    j["schedule"] = {{"kind", "harmonic"}, {"eta0", c.eta0}};
  }
  j["confidence"] = {{"alpha", c.alpha},
                     {"mixture_kmax", c.mixture_kmax},
                     {"v_inf_rel_tol", c.v_inf_rel_tol}};
  if (c.sigma2) j["confidence"]["sigma2"] = *c.sigma2;
  j["run"] = {{"t_cap", c.t_cap}, {"trace_stride", c.trace_stride}};
  if (c.x1) j["run"]["x1"] = *c.x1;
  return j;
}

Setup build_setup(const ExperimentConfig& c) {
  ConvexProblem problem =
      make_quadratic(to_vec(c.mu), to_vec(c.anchor), make_region(c), c.oracle);
  NoiseModel noise = c.noise_kind == "gaussian"
                         ? NoiseModel(GaussianNoise{c.sigma})
                         : NoiseModel(BoundedUniformNoise{c.nu});
  StepSchedule schedule = c.schedule_kind == "polynomial"
                              ? StepSchedule::polynomial(c.gamma, c.eta0)
                              : StepSchedule::harmonic(c.eta0);
  try {
    return make_setup(std::move(problem), noise, std::move(schedule), c.alpha,
                      c.mixture_kmax, c.v_inf_rel_tol, c.sigma2);
  } catch (const ConfigError&) {
    throw;
  } catch (const DomainError& e) {
    throw ConfigError(std::string("$.confidence: ") + e.what());
  }
}

Vec start_point(const ExperimentConfig& c, const ConvexProblem& problem) {
  if (c.x1) return to_vec(*c.x1);
  return problem.project(Vec::Zero(problem.dim));
}

}  // namespace certsgd
