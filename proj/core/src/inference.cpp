#include "xover/inference.hpp"

#include <cmath>
#include <string>

#include "xover/errors.hpp"
#include "xover/numerics.hpp"

namespace xover {

namespace {

using numerics::normal_cdf;
using numerics::normal_quantile;

void check_alpha(double alpha) {
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw InvalidInput("alpha must lie in (0,1)");
}

void check_sigma2(double s2, const char* name) {
  if (!(s2 > 0.0) || !std::isfinite(s2))
    throw InvalidInput(std::string(name) + " must be a positive variance");
}

void check_n(double n) {
  if (!(n > 0.0) || !std::isfinite(n))
    throw InvalidInput("sample size must be positive");
}

}  // namespace

PotentialOutcomeMeans potential_outcome_means(const EffectScenario& s,
                                              bool carryover) {
  PotentialOutcomeMeans m;
  m.y1_0 = s.mu;
  m.y1_1 = s.mu + s.theta1;
  if (carryover) {
    m.y2_00 = s.mu + s.tau_tilde;
    m.y2_10 = s.mu + s.tau_tilde + s.lambda0;
    m.y2_11 = s.mu + s.tau_tilde + s.theta2_tilde;
    m.y2_01 = s.mu + s.tau_tilde + s.theta2_tilde - s.lambda1;
  } else {
    // Complete washout: the first-period assignment leaves no trace.
    m.y2_00 = s.mu + s.tau_tilde;
    m.y2_10 = s.mu + s.tau_tilde;
    m.y2_11 = s.mu + s.tau_tilde + s.theta2_tilde;
    m.y2_01 = s.mu + s.tau_tilde + s.theta2_tilde;
  }
  return m;
}

double expected_basic_estimand(const EffectScenario& s) {
  return 0.5 * (s.theta1 + s.theta2_tilde - s.lambda0 - s.lambda1);
}

TestOutcome one_sided_test(const EstimateReport& report,
                           const DesignParams& design) {
  check_alpha(design.alpha);
  if (!(report.standard_error > 0.0))
    throw DegenerateVariance("one_sided_test: zero standard error");
  TestOutcome out;
  out.statistic = (report.estimate - design.theta_star) / report.standard_error;
  out.critical_value = normal_quantile(1.0 - design.alpha);
  out.reject = out.statistic > out.critical_value;
  out.p_value = normal_cdf(-out.statistic);
  return out;
}

double type1_error_cr(double lambda0, double lambda1, double sigma2_cr,
                      double n_real, double alpha) {
  check_alpha(alpha);
  check_sigma2(sigma2_cr, "sigma2_cr");
  check_n(n_real);
  double drift =
      std::sqrt(n_real) * 0.5 * (lambda0 + lambda1) / std::sqrt(sigma2_cr);
  return normal_cdf(-normal_quantile(1.0 - alpha) - drift);
}

double type1_error_cr(double lambda0, double lambda1, double sigma2_cr,
                      const DesignParams& design) {
  return type1_error_cr(lambda0, lambda1, sigma2_cr,
                        static_cast<double>(design.n), design.alpha);
}

double power_crossover(double effect, double carryover_sum, double sigma2_cr,
                       double n_real, double alpha, double theta_star) {
  check_alpha(alpha);
  check_sigma2(sigma2_cr, "sigma2_cr");
  check_n(n_real);
  double drift = std::sqrt(n_real) *
                 (effect - 0.5 * carryover_sum - theta_star) /
                 std::sqrt(sigma2_cr);
  return normal_cdf(-normal_quantile(1.0 - alpha) + drift);
}

double power_crossover(double effect, double carryover_sum, double sigma2_cr,
                       const DesignParams& design) {
  return power_crossover(effect, carryover_sum, sigma2_cr,
                         static_cast<double>(design.n), design.alpha,
                         design.theta_star);
}

double power_parallel(double effect, double sigma2_pr, double n_real,
                      double alpha, double theta_star) {
  check_alpha(alpha);
  check_sigma2(sigma2_pr, "sigma2_pr");
  check_n(n_real);
  double drift =
      std::sqrt(n_real) * (effect - theta_star) / std::sqrt(sigma2_pr);
  return normal_cdf(-normal_quantile(1.0 - alpha) + drift);
}

double power_parallel(double effect, double sigma2_pr,
                      const DesignParams& design) {
  return power_parallel(effect, sigma2_pr, static_cast<double>(design.n),
                        design.alpha, design.theta_star);
}

SampleSizeResult sample_size(SampleSizeKind kind, double effect,
                             double carryover_sum, double sigma2, double alpha,
                             double beta) {
  check_alpha(alpha);
  check_alpha(beta);
  check_sigma2(sigma2, "sigma2");
  double denom = effect;
  if (kind == SampleSizeKind::cr_carryover) denom -= 0.5 * carryover_sum;
  if (!(denom > 0.0)) {
    std::string detail =
        kind == SampleSizeKind::cr_carryover
            ? "effect - carryover_sum/2 = " + std::to_string(denom) + " <= 0"
            : "effect = " + std::to_string(denom) + " <= 0";
    throw InfeasibleDesign("sample_size: detectable effect must be positive (" +
                           detail + ")");
  }
  double zsum = normal_quantile(1.0 - alpha) + normal_quantile(1.0 - beta);
  SampleSizeResult r;
  r.n_exact = zsum * zsum * sigma2 / (denom * denom);
  r.n = static_cast<std::size_t>(std::ceil(r.n_exact));
  return r;
}

double pitman_are(double sigma2_cr, double sigma2_pr, double theta_alt,
                  double carryover_sum) {
  check_sigma2(sigma2_cr, "sigma2_cr");
  check_sigma2(sigma2_pr, "sigma2_pr");
  if (!(theta_alt > 0.0))
    throw InfeasibleDesign("pitman_are: theta_alt must be positive");
  double shrink = 1.0 - carryover_sum / (2.0 * theta_alt);
  if (shrink == 0.0)
    throw InfeasibleDesign(
        "pitman_are: carry-over cancels the alternative "
        "(carryover_sum == 2*theta_alt)");
  return (sigma2_cr / sigma2_pr) / (shrink * shrink);
}

double carryover_breakeven(double theta_alt, double sigma_cr,
                           double sigma_pr) {
  if (!(theta_alt > 0.0))
    throw InvalidInput("carryover_breakeven: theta_alt must be positive");
  if (!(sigma_cr > 0.0) || !(sigma_pr > 0.0))
    throw InvalidInput("carryover_breakeven: standard deviations must be positive");
  if (!(sigma_cr < sigma_pr))
    throw InfeasibleDesign(
        "carryover_breakeven: requires sigma_cr < sigma_pr, got sigma_cr=" +
        std::to_string(sigma_cr) + " >= sigma_pr=" + std::to_string(sigma_pr));
  return theta_alt * (1.0 - sigma_cr / sigma_pr);
}

double optimal_allocation(double var_term_arm1, double var_term_arm0) {
  if (!(var_term_arm1 >= 0.0) || !(var_term_arm0 >= 0.0) ||
      !(var_term_arm1 + var_term_arm0 > 0.0))
    throw InvalidInput("optimal_allocation: variance terms must be "
                       "nonnegative and not both zero");
  double s1 = std::sqrt(var_term_arm1), s0 = std::sqrt(var_term_arm0);
  return s1 / (s1 + s0);
}

TestOutcome sensitivity_test(const EstimateReport& report,
                             const DesignParams& design,
                             const SensitivitySpec& spec) {
  if (!(spec.lambda_shift <= 0.0))
    throw InvalidInput("sensitivity_test: lambda_shift must be <= 0");
  check_alpha(design.alpha);
  if (!(report.standard_error > 0.0))
    throw DegenerateVariance("sensitivity_test: zero standard error");
  TestOutcome out;
  out.statistic = (report.estimate - design.theta_star + spec.lambda_shift) /
                  report.standard_error;
  out.critical_value = normal_quantile(1.0 - design.alpha);
  out.reject = out.statistic > out.critical_value;
  out.p_value = normal_cdf(-out.statistic);
  return out;
}

double tipping_point(const EstimateReport& report,
                     const DesignParams& design) {
  check_alpha(design.alpha);
  if (!(report.standard_error > 0.0))
    throw DegenerateVariance("tipping_point: zero standard error");
  return normal_quantile(1.0 - design.alpha) * report.standard_error -
         (report.estimate - design.theta_star);
}

}  // namespace xover
