#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xover/matrix.hpp"

namespace xover {

// Estimation methods.  cr-prefixed methods use both periods of a crossover
// trial; pr-prefixed methods restrict to first-period data, mimicking a
// parallel-group analysis on the same subjects.  The *_adj variants apply
// heterogeneous (per-arm) linear covariate adjustment.
enum class Method { cr, cr_alt, pr, cr_adj, pr_adj };

const char* method_name(Method m);
std::optional<Method> method_from_name(std::string_view name);

// One two-period trial: per-subject treatment-sequence indicator
// (arm 1 = active first, arm 0 = active second), period outcomes y1/y2 and
// optional baseline covariates.  pi1 is the design (not realized)
// probability of assignment to arm 1.
struct TrialDataset {
  std::vector<int> arm;
  std::vector<double> y1;
  std::vector<double> y2;
  Matrix covariates;  // n x d, d may be 0
  std::vector<std::string> covariate_names;
  double pi1 = 0.5;

  std::size_t n() const noexcept { return arm.size(); }
  std::size_t arm_count(int a) const;

  // Structural checks: consistent lengths, arms coded 0/1, finite outcomes,
  // pi1 in (0,1).  Throws InvalidInput on violation.
  void validate() const;
};

// Within-subject period differences y1 - y2 and their per-arm first two
// moments.
struct DeltaView {
  std::vector<double> delta;  // subject order preserved
  double mean1 = 0.0;
  double mean0 = 0.0;
  double var1 = 0.0;  // unbiased sample variances
  double var0 = 0.0;
  std::size_t n1 = 0;
  std::size_t n0 = 0;
};

// Point estimate plus the estimated asymptotic variance of sqrt(n) * (est -
// truth); standard_error = sqrt(asymptotic_variance / n).
struct EstimateReport {
  double estimate = 0.0;
  double asymptotic_variance = 0.0;
  double standard_error = 0.0;
  std::size_t n = 0;
  Method method = Method::cr;
  bool degenerate_variance = false;  // zero dispersion in every arm
};

}  // namespace xover
