#include "certsgd/confseq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "certsgd/errors.hpp"

namespace certsgd {
namespace {

constexpr double kE = std::numbers::e;

double log_log_e_plus(double v) { return std::log(std::log(kE + v)); }

double log_weight(std::uint32_t k) {
  static const std::vector<double> table = [] {
    std::vector<double> t(10001);
    for (std::uint32_t i = 0; i < t.size(); ++i) {
      t[i] = std::log(MixtureConfig::weight(i));
    }
    return t;
  }();
  return k < table.size() ? table[k] : std::log(MixtureConfig::weight(k));
}

}  // namespace

void check_alpha_domain(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0 / kE)) {
    throw DomainError("alpha = " + std::to_string(alpha) +
                      " is outside the admissible domain (0, 2/e)");
  }
}

ConfidenceConfig::ConfidenceConfig(double alpha, double sigma2, double r_x2,
                                   double v_inf_upper)
    : alpha_(alpha), sigma2_(sigma2), r_x2_(r_x2), v_inf_upper_(v_inf_upper) {
  check_alpha_domain(alpha);
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw DomainError("variance proxy sigma2 must be positive and finite");
  }
  if (!(r_x2 > 0.0) || !std::isfinite(r_x2)) {
    throw DomainError("squared diameter r_x2 must be positive and finite");
  }
  if (!(v_inf_upper > 0.0) || !std::isfinite(v_inf_upper)) {
    throw DomainError("v_inf_upper must be positive and finite");
  }
  l_alpha_ = std::log(2.0 / alpha);
  sigma_inf_eff2_ = std::max(sigma2 * r_x2 * v_inf_upper, variance_floor());
  c1_ = constant_c1(sigma_inf_eff2_);
  big_c_ = 6.0 * std::sqrt(c1_);
  lambda0_ = std::sqrt(c1_ / std::sqrt(kE));
}

double MixtureConfig::weight(std::uint32_t k) {
  const double k1 = static_cast<double>(k) + 1.0;
  return 6.0 / (std::numbers::pi * std::numbers::pi * k1 * k1);
}

double MixtureConfig::lambda(std::uint32_t k, const ConfidenceConfig& config) {
  return config.lambda0() * std::exp(-0.5 * static_cast<double>(k));
}

double MixtureConfig::truncated_mass() const {
  double m = 0.0;
  for (std::uint32_t k = k_max + 1; k-- > 0;) m += weight(k);
  return m;
}

double effective_variance(double sigma2_cum, const ConfidenceConfig& config) {
  return std::max(sigma2_cum, config.variance_floor());
}

double constant_c1(double sigma_inf_eff2) {
  const double ratio = std::log(std::log(sigma_inf_eff2) + 1.0) /
                       std::log(std::log(kE + 1.0));
  return std::max(1.0, ratio);
}

double envelope(double v, const ConfidenceConfig& config) {
  return config.big_c() * std::sqrt(v * (config.l_alpha() + log_log_e_plus(v)));
}

double boundary_value(double s_t, double variance, double offset,
                      double sum_eta2_g2, const ConfidenceConfig& config) {
  const double v_eff = effective_variance(variance, config);
  return (envelope(v_eff, config) + offset + sum_eta2_g2) / (2.0 * s_t);
}

double u_obs(double s_t, double v_t, double sum_eta2_g2,
             const ConfidenceConfig& config) {
  return boundary_value(s_t, config.sigma2() * config.r_x2() * v_t,
                        config.r_x2(), sum_eta2_g2, config);
}

double u_adaptive(double s_t, double sigma2_sum, double z_1, double sum_eta2_g2,
                  const ConfidenceConfig& config) {
  return boundary_value(s_t, sigma2_sum, z_1, sum_eta2_g2, config);
}

double log_mixture(double xbar, double sigma2_cum,
                   const ConfidenceConfig& config, const MixtureConfig& mix) {
  // Exponents a_k = log w_k + lambda_k xbar - 2 lambda_k^2 sigma2_cum,
  // combined as max + log sum exp(a_k - max).
  const double lambda0 = config.lambda0();
  double shift = -std::numeric_limits<double>::infinity();
  thread_local std::vector<double> exps;
  exps.resize(mix.k_max + 1);
  double lam = lambda0;
  const double decay = std::exp(-0.5);
  for (std::uint32_t k = 0; k <= mix.k_max; ++k) {
    const double a =
        log_weight(k) + lam * xbar - 2.0 * lam * lam * sigma2_cum;
    exps[k] = a;
    shift = std::max(shift, a);
    lam *= decay;
  }
  double acc = 0.0;
  for (std::uint32_t k = 0; k <= mix.k_max; ++k) acc += std::exp(exps[k] - shift);
  return shift + std::log(acc);
}

double boundary_bk(std::uint32_t k, double v, const ConfidenceConfig& config) {
  const double lam = MixtureConfig::lambda(k, config);
  return std::log(1.0 / (config.alpha() * MixtureConfig::weight(k))) / lam +
         2.0 * lam * v;
}

double min_boundary_bk(double v, const ConfidenceConfig& config,
                       std::uint32_t k_max) {
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t k = 0; k <= k_max; ++k) {
    best = std::min(best, boundary_bk(k, v, config));
  }
  return best;
}

std::int64_t grid_index(double v, const ConfidenceConfig& config) {
  if (!(v >= config.variance_floor())) {
    throw DomainError("grid_index requires v >= 2 (log(2/alpha) + 1)");
  }
  return static_cast<std::int64_t>(
      std::floor(std::log(v / (config.l_alpha() + log_log_e_plus(v)))));
}

std::vector<double> log_spaced(double lo, double hi, std::size_t n_points) {
  std::vector<double> out;
  if (n_points == 0) return out;
  if (n_points == 1 || hi <= lo) {
    out.push_back(lo);
    return out;
  }
  const double a = std::log(lo);
  const double b = std::log(hi);
  out.reserve(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    const double frac = static_cast<double>(i) / (n_points - 1);
    out.push_back(std::exp(a + frac * (b - a)));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

LemmaReport verify_appendix_lemmas(const std::vector<double>& alpha_grid,
                                   const std::vector<double>& v_grid) {
  LemmaReport report;
  report.min_slack_loglog = std::numeric_limits<double>::infinity();
  report.min_slack_threshold = std::numeric_limits<double>::infinity();
  if (alpha_grid.empty() || v_grid.empty()) return report;

  const double v_top = *std::max_element(v_grid.begin(), v_grid.end());
  for (double alpha : alpha_grid) {
    check_alpha_domain(alpha);
    const double l = std::log(2.0 / alpha);
    const double c1 = v_top > 1.0 ? constant_c1(v_top) : 1.0;
    for (double v : v_grid) {
      if (v > l && v <= v_top && v_top > 1.0) {
        const double slack =
            c1 * std::log(std::log(v + kE)) - std::log(std::log(v / l) + 1.0);
        ++report.checked;
        report.min_slack_loglog = std::min(report.min_slack_loglog, slack);
        if (!(slack >= 0.0)) {
          report.violations.push_back({"loglog-bound", alpha, v, slack});
        }
      }
      if (v >= 2.0 * (l + 1.0)) {
        const double slack = v - l - log_log_e_plus(v);
        ++report.checked;
        report.min_slack_threshold = std::min(report.min_slack_threshold, slack);
        if (!(slack > 0.0)) {
          report.violations.push_back({"explicit-threshold", alpha, v, slack});
        }
      }
    }
  }
  return report;
}

LemmaReport verify_boundary_dominance(const ConfidenceConfig& config,
                                      std::uint32_t k_max,
                                      std::size_t n_points) {
  LemmaReport report;
  report.min_slack_loglog = std::numeric_limits<double>::infinity();
  report.min_slack_threshold = std::numeric_limits<double>::infinity();
  const auto grid =
      log_spaced(config.variance_floor(), config.sigma_inf_eff2(), n_points);
  for (double v : grid) {
    const double slack = envelope(v, config) - min_boundary_bk(v, config, k_max);
    ++report.checked;
    report.min_slack_loglog = std::min(report.min_slack_loglog, slack);
    if (!(slack >= 0.0)) {
      report.violations.push_back({"boundary-dominance", config.alpha(), v, slack});
    }
    const auto k = grid_index(v, config);
    ++report.checked;
    report.min_slack_threshold =
        std::min(report.min_slack_threshold, static_cast<double>(k));
    if (k < 0) {
      report.violations.push_back(
          {"grid-index-nonnegative", config.alpha(), v, static_cast<double>(k)});
    }
  }
  return report;
}

}  // namespace certsgd
