#pragma once

#include <cstddef>
#include <vector>

#include "xover/matrix.hpp"

namespace xover {

// Fitted logistic regression: P(Y=1|x) = expit(intercept + slopes . x).
struct LogisticModel {
  double intercept = 0.0;
  std::vector<double> slopes;

  double linear_predictor(const double* x) const {
    double eta = intercept;
    for (std::size_t j = 0; j < slopes.size(); ++j) eta += slopes[j] * x[j];
    return eta;
  }
};

// Convergence diagnostics for the iterative solvers.
struct SolveReport {
  bool converged = false;
  std::size_t iterations = 0;
  double residual = 0.0;  // final gradient norm / bracket residual
};

namespace numerics {

// Standard normal CDF, accurate to a few ulps over the whole real line.
double normal_cdf(double z);

// Standard normal density.
double normal_pdf(double z);

// Inverse standard normal CDF for p in (0,1).  Rational initial guess
// polished with Halley steps against normal_cdf; |Phi(result) - p| stays
// below 1e-12 away from the extreme tails.
double normal_quantile(double p);

// Unpolished rational approximation (relative error < 1.2e-9).  Exposed
// separately because the sampling hot path prefers speed over the last few
// digits; statistical thresholds should use normal_quantile instead.
double normal_quantile_fast(double p);

double expit(double eta);

// Minimum-norm-free least squares via Householder QR (no pivoting): solves
// argmin ||design * beta - response||_2.  Requires rows >= cols >= 1 and a
// numerically full-rank design; throws SingularCovariance otherwise.
std::vector<double> least_squares(const Matrix& design,
                                  const std::vector<double>& response);

// What to do when a logistic fit runs into (quasi-)separation, i.e. fitted
// probabilities collapsing onto {0,1}: raise_error rejects the fit;
// stop_and_keep freezes the iteration and returns the current finite
// coefficients, which is how mainstream GLM implementations behave and what
// a resampling pipeline needs when a rare binary covariate draws a zero
// cell.
enum class SeparationPolicy { raise_error, stop_and_keep };

// Logistic regression by iteratively reweighted least squares.  An intercept
// column is added internally; `covariates` may have zero columns for an
// intercept-only fit.  Outcomes must contain both classes.  Throws
// NonConvergence when separation is hit under raise_error, or when the
// iteration cap is reached without convergence.
LogisticModel logistic_fit(const Matrix& covariates,
                           const std::vector<int>& outcomes,
                           SolveReport* report = nullptr,
                           SeparationPolicy on_separation =
                               SeparationPolicy::raise_error);

// Finds the intercept a such that mean_i expit(a + slopes . x_i) == target,
// by bisection.  The mean response is strictly increasing in a, so the root
// is unique; target must lie in (0,1).  The optional bracket is widened
// automatically if it does not straddle the root.
double calibrate_intercept(const std::vector<double>& slopes,
                           const Matrix& covariates, double target,
                           double bracket_lo = -40.0, double bracket_hi = 40.0,
                           SolveReport* report = nullptr);

// Sample mean and unbiased (n-1 divisor) sample variance.
double mean(const std::vector<double>& v);
double sample_variance(const std::vector<double>& v);

}  // namespace numerics
}  // namespace xover
