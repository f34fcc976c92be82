#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "certsgd/errors.hpp"
#include "certsgd/setup.hpp"
#include "json.hpp"

namespace certsgd {

// Raised for malformed or inconsistent configuration; the message names the
// offending key path (e.g. "$.confidence.alpha").
class ConfigError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Experiment description read from a JSON file:
//
//   {"problem": "quadratic", "dim": 2, "mu": [1, 1], "anchor": [0, 0],
//    "region": {"kind": "ball", "center": [0, 0], "radius": 1.0},
//    "oracle": true,
//    "noise": {"kind": "gaussian", "sigma": 1.0},
//    "schedule": {"kind": "harmonic", "eta0": 1.0},
//    "confidence": {"alpha": 0.1, "mixture_kmax": 200, "v_inf_rel_tol": 1e-10},
//    "run": {"x1": [0, 0], "t_cap": 100000, "trace_stride": 1}}
//
// Blocks other than the problem fields are optional and default as above.
struct ExperimentConfig {
  std::string problem = "quadratic";
  int dim = 2;
  std::vector<double> mu{1.0, 1.0};
  std::vector<double> anchor{0.0, 0.0};
  std::string region_kind = "ball";
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<double> center{0.0, 0.0};
  double radius = 1.0;
  bool oracle = true;

  std::string noise_kind = "gaussian";
  double sigma = 1.0;
  double nu = 0.0;

  std::string schedule_kind = "harmonic";
  double gamma = 0.75;
  double eta0 = 1.0;

  double alpha = 0.1;
  std::uint32_t mixture_kmax = 200;
  double v_inf_rel_tol = 1e-10;
  std::optional<double> sigma2;

  std::optional<std::vector<double>> x1;
  std::uint64_t t_cap = 100000;
  std::uint64_t trace_stride = 1;
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& config);

// Cross-field validation (alpha and gamma domains, dimensions, feasible x1).
// Called by parse_config; call again after overriding fields.
void validate(const ExperimentConfig& config);

Setup build_setup(const ExperimentConfig& config);

// run.x1 when given, else the projection of the origin.
Vec start_point(const ExperimentConfig& config, const ConvexProblem& problem);

}  // namespace certsgd
