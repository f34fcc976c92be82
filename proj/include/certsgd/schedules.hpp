#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace certsgd {

enum class ScheduleKind { kPolynomial, kHarmonic, kExplicit };

// Deterministic stepsize law eta_t, t >= 1.
//
//   Polynomial: eta_t = eta0 * t^{-gamma},  gamma in (1/2, 1)
//   Harmonic:   eta_t = eta0 / t
//   Explicit:   eta_t = values[t - 1], with a caller-declared bound on
//               sum_t eta_t^2
class StepSchedule {
 public:
  static StepSchedule polynomial(double gamma, double eta0);
  static StepSchedule harmonic(double eta0);
  static StepSchedule explicit_values(std::vector<double> values,
                                      std::optional<double> v_inf_upper);

  double eta(std::uint64_t t) const;

  ScheduleKind kind() const { return kind_; }
  double gamma() const { return gamma_; }
  double eta0() const { return eta0_; }
  const std::vector<double>& values() const { return values_; }
  std::optional<double> declared_v_inf() const { return declared_v_inf_; }

  std::string describe() const;

 private:
  StepSchedule() = default;

  ScheduleKind kind_ = ScheduleKind::kHarmonic;
  double gamma_ = 1.0;
  double eta0_ = 1.0;
  std::vector<double> values_;
  std::optional<double> declared_v_inf_;
};

// S_t = sum_{s<=t} eta_s and V_t = sum_{s<=t} eta_s^2.
struct CumulativeSums {
  std::uint64_t t = 0;
  double s_t = 0.0;
  double v_t = 0.0;
};

// Exact partial sums by compensated running accumulation.
CumulativeSums cumulative(const StepSchedule& schedule, std::uint64_t t);

// Certified upper bound on V_inf = sum_{s>=1} eta_s^2, within relative
// tolerance rel_tol of the true value.
double v_infinity_upper(const StepSchedule& schedule, double rel_tol = 1e-10);

// Closed-form lower bound on S_t: eta0 (t^{1-gamma} - 1)/(1-gamma) for the
// polynomial law, eta0 log t for the harmonic law.
double s_lower_bound(const StepSchedule& schedule, std::uint64_t t);

// S_t for arbitrarily large t. Direct summation up to a cutoff, then an
// Euler-Maclaurin expansion of the remaining block.
double partial_sum_s(const StepSchedule& schedule, std::uint64_t t);

// Times up to this value are summed term by term in partial_sum_s.
constexpr std::uint64_t kDirectSumCutoff = std::uint64_t{1} << 22;

// sum_{s=a}^{b} eta_s by Euler-Maclaurin; accurate to double precision for
// a > kDirectSumCutoff. Polynomial and harmonic kinds only.
double block_sum_s(const StepSchedule& schedule, std::uint64_t a,
                   std::uint64_t b);

struct SumBoundViolation {
  std::uint64_t t = 0;
  double s_t = 0.0;
  double lower = 0.0;
};

// Checks s_lower_bound(t) <= S_t over an increasing grid of times.
std::vector<SumBoundViolation> verify_sum_lower_bounds(
    const StepSchedule& schedule, const std::vector<std::uint64_t>& t_grid);

// Log-spaced integer grid over [1, t_max] with at most n_points distinct
// entries, strictly increasing.
std::vector<std::uint64_t> log_spaced_times(std::uint64_t t_max,
                                            std::size_t n_points);

}  // namespace certsgd
