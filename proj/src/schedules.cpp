#include "certsgd/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "certsgd/errors.hpp"
#include "certsgd/summation.hpp"

namespace certsgd {
namespace {

void require_positive_finite(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(what) + " must be positive and finite");
  }
}

// sum_{n=a}^{b} n^{-p} for 1 <= a <= b by Euler-Maclaurin through the
// third-derivative correction. Used only for a >= kDirectSumCutoff, where
// the omitted fifth-derivative term is far below double precision.
double power_block_sum(double p, double a, double b) {
  auto f = [p](double x) { return std::pow(x, -p); };
  auto d1 = [p](double x) { return -p * std::pow(x, -p - 1.0); };
  auto d3 = [p](double x) {
    return -p * (p + 1.0) * (p + 2.0) * std::pow(x, -p - 3.0);
  };
  double integral;
  if (p == 1.0) {
    integral = std::log(b / a);
  } else {
    integral = (std::pow(b, 1.0 - p) - std::pow(a, 1.0 - p)) / (1.0 - p);
  }
  return integral + 0.5 * (f(a) + f(b)) + (d1(b) - d1(a)) / 12.0 -
         (d3(b) - d3(a)) / 720.0;
}

double power_exponent(const StepSchedule& schedule) {
  return schedule.kind() == ScheduleKind::kHarmonic ? 1.0 : schedule.gamma();
}

}  // namespace

StepSchedule StepSchedule::polynomial(double gamma, double eta0) {
  if (!(gamma > 0.5 && gamma < 1.0)) {
    throw DomainError("polynomial schedule requires gamma in (1/2, 1)");
  }
  require_positive_finite(eta0, "eta0");
  StepSchedule s;
  s.kind_ = ScheduleKind::kPolynomial;
  s.gamma_ = gamma;
  s.eta0_ = eta0;
  return s;
}

StepSchedule StepSchedule::harmonic(double eta0) {
  require_positive_finite(eta0, "eta0");
  StepSchedule s;
  s.kind_ = ScheduleKind::kHarmonic;
  s.gamma_ = 1.0;
  s.eta0_ = eta0;
  return s;
}

StepSchedule StepSchedule::explicit_values(std::vector<double> values,
                                           std::optional<double> v_inf_upper) {
  if (values.empty()) {
    throw DomainError("explicit schedule needs at least one stepsize");
  }
  for (double v : values) require_positive_finite(v, "explicit stepsize");
  if (v_inf_upper) {
    require_positive_finite(*v_inf_upper, "declared V_inf bound");
    CompensatedSum v2;
    for (double v : values) v2 += v * v;
    if (v2.value() > *v_inf_upper) {
      throw DomainError(
          "declared V_inf bound is below the sum of squared stepsizes");
    }
  }
  StepSchedule s;
  s.kind_ = ScheduleKind::kExplicit;
  s.eta0_ = values.front();
  s.values_ = std::move(values);
  s.declared_v_inf_ = v_inf_upper;
  return s;
}

double StepSchedule::eta(std::uint64_t t) const {
  if (t == 0) throw std::out_of_range("stepsize index starts at t = 1");
  switch (kind_) {
    case ScheduleKind::kPolynomial:
      return eta0_ * std::pow(static_cast<double>(t), -gamma_);
    case ScheduleKind::kHarmonic:
      return eta0_ / static_cast<double>(t);
    case ScheduleKind::kExplicit:
      if (t > values_.size()) {
        throw std::out_of_range("explicit schedule has no stepsize for t = " +
                                std::to_string(t));
      }
      return values_[t - 1];
  }
  return 0.0;
}

std::string StepSchedule::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case ScheduleKind::kPolynomial:
      os << "polynomial(gamma=" << gamma_ << ", eta0=" << eta0_ << ")";
      break;
    case ScheduleKind::kHarmonic:
      os << "harmonic(eta0=" << eta0_ << ")";
      break;
    case ScheduleKind::kExplicit:
      os << "explicit(n=" << values_.size() << ")";
      break;
  }
  return os.str();
}

CumulativeSums cumulative(const StepSchedule& schedule, std::uint64_t t) {
  if (t == 0) throw std::out_of_range("cumulative sums start at t = 1");
  CompensatedSum s;
  CompensatedSum v;
  for (std::uint64_t i = 1; i <= t; ++i) {
    const double e = schedule.eta(i);
    s += e;
    v += e * e;
  }
  return {t, s.value(), v.value()};
}

double v_infinity_upper(const StepSchedule& schedule, double rel_tol) {
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) {
    throw DomainError("rel_tol must lie in (0, 1)");
  }
  const double eta0 = schedule.eta0();
  switch (schedule.kind()) {
    case ScheduleKind::kHarmonic: {
      const double pi2_6 = std::numbers::pi * std::numbers::pi / 6.0;
      return std::nextafter(eta0 * eta0 * pi2_6,
                            std::numeric_limits<double>::infinity());
    }
    case ScheduleKind::kExplicit:
      if (!schedule.declared_v_inf()) {
        throw Unavailable(
            "explicit schedule has no declared V_inf bound; tail is unknown");
      }
      return *schedule.declared_v_inf();
    case ScheduleKind::kPolynomial:
      break;
  }

  // zeta(p) for p = 2 gamma > 1 via Euler-Maclaurin at cut N:
  //   sum_{n<N} n^-p + N^{1-p}/(p-1) + N^-p/2 + p N^{-p-1}/12
  // overestimates zeta(p) by at most the next correction
  // p(p+1)(p+2) N^{-p-3}/720, which is added once more so the result is an
  // upper bound regardless of the sign of the remainder.
  const double p = 2.0 * schedule.gamma();
  std::uint64_t n = 16;
  while (true) {
    const double nd = static_cast<double>(n);
    const double next_term =
        p * (p + 1.0) * (p + 2.0) * std::pow(nd, -p - 3.0) / 720.0;
    if (2.0 * next_term <= rel_tol * 1e-3 || n >= (std::uint64_t{1} << 20)) {
      break;
    }
    n *= 2;
  }
  const double nd = static_cast<double>(n);
  CompensatedSum head;
  for (std::uint64_t k = n - 1; k >= 1; --k) {
    head += std::pow(static_cast<double>(k), -p);
  }
  head += std::pow(nd, 1.0 - p) / (p - 1.0);
  head += 0.5 * std::pow(nd, -p);
  head += p * std::pow(nd, -p - 1.0) / 12.0;
  head += p * (p + 1.0) * (p + 2.0) * std::pow(nd, -p - 3.0) / 720.0;
  // A few ulps of slack for rounding in the head sum.
  const double zeta_upper = head.value() * (1.0 + 8.0 * 2.220446049250313e-16);
  return eta0 * eta0 * zeta_upper;
}

double s_lower_bound(const StepSchedule& schedule, std::uint64_t t) {
  if (t == 0) throw std::out_of_range("s_lower_bound requires t >= 1");
  const double td = static_cast<double>(t);
  switch (schedule.kind()) {
    case ScheduleKind::kPolynomial: {
      const double g = schedule.gamma();
      return schedule.eta0() * (std::pow(td, 1.0 - g) - 1.0) / (1.0 - g);
    }
    case ScheduleKind::kHarmonic:
      return schedule.eta0() * std::log(td);
    case ScheduleKind::kExplicit:
      break;
  }
  throw Unavailable("s_lower_bound is defined for polynomial and harmonic "
                    "schedules only");
}

double partial_sum_s(const StepSchedule& schedule, std::uint64_t t) {
  if (t == 0) throw std::out_of_range("partial sums start at t = 1");
  if (schedule.kind() == ScheduleKind::kExplicit || t <= kDirectSumCutoff) {
    return cumulative(schedule, t).s_t;
  }
  const double head = cumulative(schedule, kDirectSumCutoff).s_t;
  return head + block_sum_s(schedule, kDirectSumCutoff + 1, t);
}

double block_sum_s(const StepSchedule& schedule, std::uint64_t a,
                   std::uint64_t b) {
  if (schedule.kind() == ScheduleKind::kExplicit) {
    throw Unavailable("block sums need a closed-form schedule");
  }
  if (a == 0 || b < a) throw DomainError("block sum requires 1 <= a <= b");
  return schedule.eta0() * power_block_sum(power_exponent(schedule),
                                           static_cast<double>(a),
                                           static_cast<double>(b));
}

std::vector<SumBoundViolation> verify_sum_lower_bounds(
    const StepSchedule& schedule, const std::vector<std::uint64_t>& t_grid) {
  std::vector<SumBoundViolation> out;
  CompensatedSum s;
  std::uint64_t t = 0;
  for (std::uint64_t target : t_grid) {
    if (target < t) throw DomainError("time grid must be nondecreasing");
    while (t < target) s += schedule.eta(++t);
    const double lower = s_lower_bound(schedule, target);
    if (lower > s.value()) out.push_back({target, s.value(), lower});
  }
  return out;
}

std::vector<std::uint64_t> log_spaced_times(std::uint64_t t_max,
                                            std::size_t n_points) {
  std::vector<std::uint64_t> out;
  if (t_max == 0 || n_points == 0) return out;
  const double top = std::log(static_cast<double>(t_max));
  for (std::size_t i = 0; i < n_points; ++i) {
    const double frac =
        n_points == 1 ? 1.0 : static_cast<double>(i) / (n_points - 1);
    auto t = static_cast<std::uint64_t>(std::llround(std::exp(frac * top)));
    t = std::clamp<std::uint64_t>(t, 1, t_max);
    if (out.empty() || t > out.back()) out.push_back(t);
  }
  if (out.back() != t_max) out.push_back(t_max);
  return out;
}

}  // namespace certsgd
