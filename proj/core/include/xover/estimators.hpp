#pragma once

#include <vector>

#include "xover/matrix.hpp"
#include "xover/trial_data.hpp"

namespace xover {

// Which response the covariate adjustment targets: the within-subject period
// difference (crossover analyses) or the first-period outcome alone
// (parallel-group analyses).
enum class AdjustResponse { delta, y1 };

// Per-arm linear adjustment fit and the pooled covariate dispersion needed
// for the adjusted variance estimators.
struct AdjustmentFit {
  std::vector<double> beta1;  // arm-1 slope vector
  std::vector<double> beta0;  // arm-0 slope vector
  double resid_var1 = 0.0;    // sample variance of arm-1 residuals
  double resid_var0 = 0.0;
  std::vector<double> xbar1;  // arm-wise covariate means
  std::vector<double> xbar0;
  std::vector<double> xbar;   // pooled covariate means
  Matrix sigma_x;             // pooled covariate sample covariance
  AdjustResponse response = AdjustResponse::delta;
};

// Period differences with per-arm moments.  Requires >= 2 subjects per arm.
DeltaView compute_deltas(const TrialDataset& data);

// Half the between-arm difference of mean period changes; the workhorse
// crossover estimator.
EstimateReport theta_cr(const TrialDataset& data);

// Sign-flipped pooled form of the same contrast: averages A*delta over arm 1
// and -delta over arm 0 subjects.  Coincides with theta_cr exactly under
// equal allocation but weights arms by realized size otherwise.
EstimateReport theta_cr_alt(const TrialDataset& data);

// First-period-only contrast of means (parallel-group analysis).
EstimateReport theta_pr(const TrialDataset& data);

// Arm-wise least-squares covariate adjustment for the chosen response.
// Requires at least one covariate column and per-arm sample size exceeding
// the covariate dimension plus one.
AdjustmentFit fit_adjustment(const TrialDataset& data, AdjustResponse response);

// Covariate-adjusted versions of theta_cr / theta_pr.  Their asymptotic
// variance never exceeds the unadjusted counterpart in the large-sample
// limit, and the adjusted point estimate reduces to the unadjusted one when
// both arms' covariate means coincide.
EstimateReport theta_cr_adj(const TrialDataset& data);
EstimateReport theta_pr_adj(const TrialDataset& data);

// Dispatch by method tag.
EstimateReport estimate(const TrialDataset& data, Method method);

}  // namespace xover
