#pragma once

#include <cstddef>
#include <vector>

#include "xover/trial_data.hpp"

namespace xover {

// Mean structure of the six potential outcomes.  theta1 is the first-period
// treatment effect; theta2_tilde the second-period effect as it manifests
// after a washout that may be incomplete: lambda0 is the residual effect of
// first-period treatment on a second-period control response, lambda1 the
// behavioral shortfall when treatment follows control.  With both lambdas
// zero, theta2_tilde and tau_tilde are the clean second-period effect and
// period shift.
struct EffectScenario {
  double mu = 0.0;
  double theta1 = 0.0;
  double theta2_tilde = 0.0;
  double tau_tilde = 0.0;
  double lambda0 = 0.0;
  double lambda1 = 0.0;
};

// Expectations of (Y1^0, Y1^1, Y2^00, Y2^10, Y2^11, Y2^01).
struct PotentialOutcomeMeans {
  double y1_0 = 0.0;
  double y1_1 = 0.0;
  double y2_00 = 0.0;
  double y2_10 = 0.0;
  double y2_11 = 0.0;
  double y2_01 = 0.0;
};

// Design knobs shared by the analytic power/size routines.
struct DesignParams {
  std::size_t n = 0;
  double pi1 = 0.5;
  double alpha = 0.025;     // one-sided level
  double theta_star = 0.0;  // margin: test H0 theta <= theta_star
};

struct TestOutcome {
  double statistic = 0.0;
  double p_value = 0.0;
  bool reject = false;
  double critical_value = 0.0;
};

enum class SampleSizeKind { cr_no_carryover, cr_carryover, pr };

struct SampleSizeResult {
  std::size_t n = 0;      // ceil of the exact requirement
  double n_exact = 0.0;   // pre-ceiling value, useful for ratio identities
};

// Sensitivity-analysis request: shift the tested margin by Lambda <= 0 to
// probe how much unmodeled carry-over the rejection survives.
struct SensitivitySpec {
  double lambda_shift = 0.0;
};

PotentialOutcomeMeans potential_outcome_means(const EffectScenario& s,
                                              bool carryover);

// Large-sample mean of the basic crossover estimator:
// (theta1 + theta2_tilde - lambda0 - lambda1) / 2.
double expected_basic_estimand(const EffectScenario& s);

// One-sided z-test of H0: theta <= theta_star at level alpha.
TestOutcome one_sided_test(const EstimateReport& report,
                           const DesignParams& design);

// Actual rejection probability of the nominal-level crossover test when the
// true effects are null but carry-over is not:
// Phi(-z_{1-alpha} - sqrt(n) * (lambda0+lambda1)/2 / sigma_cr).
double type1_error_cr(double lambda0, double lambda1, double sigma2_cr,
                      const DesignParams& design);
double type1_error_cr(double lambda0, double lambda1, double sigma2_cr,
                      double n_real, double alpha);

// Power of the crossover test against theta1 = theta2_tilde = effect under
// carry-over (lambda0 + lambda1 = carryover_sum), and of the first-period
// test against theta1 = effect.
double power_crossover(double effect, double carryover_sum, double sigma2_cr,
                       const DesignParams& design);
double power_crossover(double effect, double carryover_sum, double sigma2_cr,
                       double n_real, double alpha, double theta_star);
double power_parallel(double effect, double sigma2_pr,
                      const DesignParams& design);
double power_parallel(double effect, double sigma2_pr, double n_real,
                      double alpha, double theta_star);

// Smallest n with power >= 1 - beta.  `effect` must already have the margin
// theta_star subtracted; carryover_sum enters only for cr_carryover.
SampleSizeResult sample_size(SampleSizeKind kind, double effect,
                             double carryover_sum, double sigma2, double alpha,
                             double beta);

// Asymptotic relative efficiency of the crossover versus first-period test
// (ratio of required sample sizes in the local limit):
// (sigma2_cr / sigma2_pr) / (1 - carryover_sum / (2*theta_alt))^2.
double pitman_are(double sigma2_cr, double sigma2_pr, double theta_alt,
                  double carryover_sum);

// Largest average carry-over (lambda0+lambda1)/2 at which the crossover test
// still needs no more subjects than the first-period test:
// theta_alt * (1 - sigma_cr / sigma_pr).
double carryover_breakeven(double theta_alt, double sigma_cr, double sigma_pr);

// Allocation pi1 minimizing a/pi1 + b/(1-pi1): sqrt(a)/(sqrt(a)+sqrt(b)).
double optimal_allocation(double var_term_arm1, double var_term_arm0);

// One-sided test of the Lambda-shifted hypothesis; rejects when
// sqrt(n)(estimate - theta_star + Lambda)/sigma exceeds z_{1-alpha}.
TestOutcome sensitivity_test(const EstimateReport& report,
                             const DesignParams& design,
                             const SensitivitySpec& spec);

// The shift at which the sensitivity test is exactly borderline:
// z_{1-alpha} * SE - (estimate - theta_star).  Negative values mean the
// unshifted rejection tolerates that much adverse carry-over; a positive
// value means no Lambda <= 0 rejects.
double tipping_point(const EstimateReport& report, const DesignParams& design);

}  // namespace xover
