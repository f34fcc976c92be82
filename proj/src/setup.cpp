#include "certsgd/setup.hpp"

#include "certsgd/errors.hpp"

namespace certsgd {

ConfidenceConfig make_confidence(const ConvexProblem& problem,
                                 const NoiseModel& noise,
                                 const StepSchedule& schedule, double alpha,
                                 double v_inf_rel_tol,
                                 std::optional<double> sigma2) {
  const double induced = noise.variance_proxy(problem);
  double proxy = induced;
  if (sigma2) {
    if (*sigma2 < induced) {
      throw DomainError("declared sigma2 is smaller than the noise model's "
                        "variance proxy " + std::to_string(induced));
    }
    proxy = *sigma2;
  }
  if (!(proxy > 0.0)) {
    throw DomainError("noise model has zero variance proxy; declare a "
                      "positive sigma2 in the confidence block");
  }
  return ConfidenceConfig(alpha, proxy, problem.r_x * problem.r_x,
                          v_infinity_upper(schedule, v_inf_rel_tol));
}

Setup make_setup(ConvexProblem problem, NoiseModel noise, StepSchedule schedule,
                 double alpha, std::uint32_t k_max, double v_inf_rel_tol,
                 std::optional<double> sigma2) {
  ConfidenceConfig conf =
      make_confidence(problem, noise, schedule, alpha, v_inf_rel_tol, sigma2);
  return Setup{std::move(problem), noise, std::move(schedule), conf,
               MixtureConfig{k_max}};
}

}  // namespace certsgd
