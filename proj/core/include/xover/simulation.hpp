#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "xover/matrix.hpp"
#include "xover/numerics.hpp"
#include "xover/rng.hpp"
#include "xover/trial_data.hpp"

namespace xover {

// ---------------------------------------------------------------------------
// Gaussian data-generating process
// ---------------------------------------------------------------------------

// Subject model: three iid standard-normal covariates enter both periods
// with unit slopes except that the third carries slope b in period 2; each
// potential outcome adds its own unit-variance noise.  theta1/theta2_tilde
// are the period effects, lambda0/lambda1 the carry-over distortions and
// tau_tilde the period shift.
struct GaussianDgpParams {
  double theta1 = 0.0;
  double theta2_tilde = 0.0;
  double tau_tilde = 0.0;
  double lambda0 = 0.0;
  double lambda1 = 0.0;
  double b = 0.0;
  std::size_t n = 0;
  double pi1 = 0.5;
};

// Population variances implied by GaussianDgpParams, used as plug-in truth
// for analytic power.
struct GaussianTruths {
  double sigma2_pr = 0.0;      // first-period contrast
  double sigma2_pr_adj = 0.0;  // same, after perfect covariate adjustment
  double sigma2_cr = 0.0;      // period-difference contrast
  double sigma2_cr_adj = 0.0;  // after perfect covariate adjustment
  double sigma2_y = 0.0;       // Var of a first-period outcome
  double rho = 0.0;            // corr(period 1, period 2) within subject
};

// All six potential outcomes per subject; the observed dataset reveals two
// of them per subject according to the assigned sequence.
struct PotentialCohort {
  Matrix covariates;
  std::vector<std::string> covariate_names;
  std::vector<double> y1_0, y1_1;
  std::vector<double> y2_00, y2_10, y2_11, y2_01;

  std::size_t n() const noexcept { return y1_0.size(); }
};

GaussianTruths gaussian_dgp_truths(const GaussianDgpParams& p);

// Draws a cohort of potential outcomes and the observed trial it induces.
// Consumes exactly 7 normal and 1 uniform variate per subject, in subject
// order, so a given stream state yields a unique dataset.
struct GaussianDraw {
  PotentialCohort cohort;
  TrialDataset observed;
};
GaussianDraw gaussian_dgp(const GaussianDgpParams& p, rng::Stream& stream);
GaussianDraw gaussian_dgp(const GaussianDgpParams& p, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Correlated Bernoulli pairs
// ---------------------------------------------------------------------------

// Law of a Bernoulli pair (Z1, Z2) with marginals p1, p2 and correlation
// rho, specified through the conditional distribution of Z2 given Z1.  Not
// every rho is compatible with the marginals; validate() enforces the open
// feasibility interval.
struct BinaryCorrelationSpec {
  double p1 = 0.5;
  double p2 = 0.5;
  double rho = 0.0;

  void validate() const;        // throws InfeasibleCorrelation / InvalidInput
  double joint11() const;       // P(Z1=1, Z2=1)
  double cond_given_1() const;  // P(Z2=1 | Z1=1)
  double cond_given_0() const;  // P(Z2=1 | Z1=0)
  double rho_lower() const;
  double rho_upper() const;
};

// Draws Z2 given an observed z1 under the spec's conditional law.
int correlated_bernoulli(const BinaryCorrelationSpec& spec, int z1,
                         rng::Stream& stream);

// ---------------------------------------------------------------------------
// Cohort-resampling data-generating process
// ---------------------------------------------------------------------------

// A real or synthetic cohort: binary baseline outcome plus covariates.
struct CohortData {
  Matrix covariates;
  std::vector<std::string> covariate_names;
  std::vector<int> y0;  // binary baseline outcome

  std::size_t n() const noexcept { return y0.size(); }
  double baseline_mean() const;
};

// Logistic model of the baseline outcome on the cohort covariates; fitted
// once per study and reused across replications.
struct BaselineFit {
  LogisticModel model;
  double fitted_mean = 0.0;  // mean fitted probability over the cohort
};
BaselineFit fit_baseline_model(const CohortData& cohort);

struct ResampleDgpConfig {
  CohortData cohort;
  double theta = 0.0;      // treatment lift on the event probability
  double lambda = 0.0;     // carry-over distortion of second-period means
  double tau_tilde = -0.05;  // secular drift of the control event rate
  double rho = 0.33;       // within-subject correlation of control outcomes
  std::size_t n = 0;       // subjects per simulated trial
  double pi1 = 0.5;
};

// Diagnostics from one cohort build: each intercept calibration with its
// target and the achieved mean probability.
struct CalibrationCheck {
  std::string label;
  double intercept = 0.0;
  double target = 0.0;
  double achieved = 0.0;
  std::vector<double> slopes;
};
struct CohortBuildTrace {
  std::vector<CalibrationCheck> calibrations;
};

// Rebuilds the six potential outcomes over the cohort subjects: treated
// first-period outcomes from the baseline model with a recalibrated
// intercept, control second-period outcomes as correlated flips of the
// baseline, and the remaining second-period outcomes from a model refitted
// to those flips with offset-calibrated intercepts.  Consumes 5*n uniforms.
PotentialCohort build_resampled_cohort(const ResampleDgpConfig& config,
                                       const BaselineFit& baseline,
                                       rng::Stream& stream,
                                       CohortBuildTrace* trace = nullptr);
// Convenience overload: fits the baseline model itself.
PotentialCohort build_resampled_cohort(const ResampleDgpConfig& config,
                                       std::uint64_t seed,
                                       CohortBuildTrace* trace = nullptr);

// Bootstrap a trial of size n from a potential cohort: subjects drawn with
// replacement, sequences assigned Bernoulli(pi1).  Consumes 2 uniforms per
// subject.
TrialDataset draw_trial(const PotentialCohort& cohort, std::size_t n,
                        double pi1, rng::Stream& stream);

// ---------------------------------------------------------------------------
// Synthetic cohort
// ---------------------------------------------------------------------------

// A packaged stand-in cohort of 336 subjects with demographic-style
// covariates (integer age, marital-status dummies, two binary infection
// markers) and a rare binary baseline outcome near 18.5%.  Deterministic for
// a given seed.
CohortData synthetic_cohort(std::uint64_t seed = 20840u);

}  // namespace xover
