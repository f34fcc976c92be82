#pragma once

#include <optional>

#include "certsgd/confseq.hpp"
#include "certsgd/problems.hpp"
#include "certsgd/schedules.hpp"

namespace certsgd {

// Everything a trajectory needs besides its random stream and start point.
struct Setup {
  ConvexProblem problem;
  NoiseModel noise;
  StepSchedule schedule;
  ConfidenceConfig confidence;
  MixtureConfig mixture;
};

// Confidence constants for `problem` under `noise` and `schedule`. The
// variance proxy defaults to the one induced by the noise model; a declared
// override must not be smaller than it.
ConfidenceConfig make_confidence(const ConvexProblem& problem,
                                 const NoiseModel& noise,
                                 const StepSchedule& schedule, double alpha,
                                 double v_inf_rel_tol = 1e-10,
                                 std::optional<double> sigma2 = std::nullopt);

Setup make_setup(ConvexProblem problem, NoiseModel noise, StepSchedule schedule,
                 double alpha, std::uint32_t k_max = 200,
                 double v_inf_rel_tol = 1e-10,
                 std::optional<double> sigma2 = std::nullopt);

}  // namespace certsgd
