#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace certsgd {

// Confidence level and the derived constants of the boundary.
//
//   l_alpha        = log(2/alpha)
//   sigma_inf_eff2 = max{sigma2 * r_x2 * v_inf, 2 (l_alpha + 1)}
//   c1             = max{1, log(log sigma_inf_eff2 + 1) / log(log(e + 1))}
//   C              = 6 sqrt(c1)
//   lambda0        = sqrt(c1 / sqrt(e))
//
// alpha must lie in (0, 2/e) so that l_alpha >= 1.
class ConfidenceConfig {
 public:
  ConfidenceConfig(double alpha, double sigma2, double r_x2, double v_inf_upper);

  double alpha() const { return alpha_; }
  double sigma2() const { return sigma2_; }
  double r_x2() const { return r_x2_; }
  double v_inf_upper() const { return v_inf_upper_; }

  double l_alpha() const { return l_alpha_; }
  double sigma_inf_eff2() const { return sigma_inf_eff2_; }
  double c1() const { return c1_; }
  double big_c() const { return big_c_; }
  double lambda0() const { return lambda0_; }

  // 2 (log(2/alpha) + 1), the floor of every effective variance proxy.
  double variance_floor() const { return 2.0 * (l_alpha_ + 1.0); }

 private:
  double alpha_;
  double sigma2_;
  double r_x2_;
  double v_inf_upper_;
  double l_alpha_;
  double sigma_inf_eff2_;
  double c1_;
  double big_c_;
  double lambda0_;
};

// Throws DomainError unless alpha lies in (0, 2/e).
void check_alpha_domain(double alpha);

// Truncated geometric grid lambda_k = lambda0 e^{-k/2} with weights
// w_k = 6 / (pi^2 (k+1)^2), k = 0..k_max.
struct MixtureConfig {
  std::uint32_t k_max = 200;

  static double weight(std::uint32_t k);
  static double lambda(std::uint32_t k, const ConfidenceConfig& config);
  double truncated_mass() const;
};

double effective_variance(double sigma2_cum, const ConfidenceConfig& config);

double constant_c1(double sigma_inf_eff2);

// (1/(2 s_t)) (C sqrt(v_eff (L_alpha + log log(e + v_eff))) + offset + sum_eta2_g2)
// with v_eff = effective_variance(variance). Both boundaries share this shape.
double boundary_value(double s_t, double variance, double offset,
                      double sum_eta2_g2, const ConfidenceConfig& config);

// C sqrt(v (L_alpha + log log(e + v))); the upper envelope of inf_k B_k(v).
double envelope(double v, const ConfidenceConfig& config);

// Observable boundary: variance sigma2 r_x2 v_t, offset r_x2.
double u_obs(double s_t, double v_t, double sum_eta2_g2,
             const ConfidenceConfig& config);

// Adaptive boundary: variance Sigma_t^2 = sum sigma2 eta_s^2 Z_s, offset Z_1.
double u_adaptive(double s_t, double sigma2_sum, double z_1, double sum_eta2_g2,
                  const ConfidenceConfig& config);

// log sum_{k<=k_max} w_k exp(lambda_k xbar - 2 lambda_k^2 sigma2_cum).
double log_mixture(double xbar, double sigma2_cum,
                   const ConfidenceConfig& config, const MixtureConfig& mix);

// B_k(v) = log(1/(alpha w_k)) / lambda_k + 2 lambda_k v.
double boundary_bk(std::uint32_t k, double v, const ConfidenceConfig& config);

// min_{k<=k_max} B_k(v).
double min_boundary_bk(double v, const ConfidenceConfig& config,
                       std::uint32_t k_max);

// k(v) = floor(log(v / (L_alpha + log log(e + v)))), for v >= 2(L_alpha + 1).
std::int64_t grid_index(double v, const ConfidenceConfig& config);

struct LemmaViolation {
  std::string lemma;
  double alpha = 0.0;
  double v = 0.0;
  double slack = 0.0;  // negative when violated
};

struct LemmaReport {
  std::size_t checked = 0;
  std::vector<LemmaViolation> violations;
  double min_slack_loglog = 0.0;    // smallest slack seen for the log-log bound
  double min_slack_threshold = 0.0;  // smallest slack seen for the threshold
  bool ok() const { return violations.empty(); }
};

// Evaluates, for every alpha and every v in v_grid:
//   log(log(v/L) + 1) <= c1 log(log(v + e))   for L < v <= max(v_grid)
//   v > L + log log(e + v)                    for v >= 2 (L + 1)
// where L = log(2/alpha) and c1 is built from max(v_grid).
LemmaReport verify_appendix_lemmas(const std::vector<double>& alpha_grid,
                                   const std::vector<double>& v_grid);

// Checks min_{k<=k_max} B_k(v) <= envelope(v) and grid_index(v) >= 0 on a
// log-spaced grid over [2(L_alpha + 1), sigma_inf_eff2].
LemmaReport verify_boundary_dominance(const ConfidenceConfig& config,
                                      std::uint32_t k_max,
                                      std::size_t n_points);

std::vector<double> log_spaced(double lo, double hi, std::size_t n_points);

}  // namespace certsgd
