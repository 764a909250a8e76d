#include "xover/trial_data.hpp"

#include <cmath>

#include "xover/errors.hpp"

namespace xover {

const char* method_name(Method m) {
  switch (m) {
    case Method::cr:
      return "cr";
    case Method::cr_alt:
      return "cr_alt";
    case Method::pr:
      return "pr";
    case Method::cr_adj:
      return "cr_adj";
    case Method::pr_adj:
      return "pr_adj";
  }
  return "?";
}

std::optional<Method> method_from_name(std::string_view name) {
  if (name == "cr") return Method::cr;
  if (name == "cr_alt") return Method::cr_alt;
  if (name == "pr") return Method::pr;
  if (name == "cr_adj") return Method::cr_adj;
  if (name == "pr_adj") return Method::pr_adj;
  return std::nullopt;
}

std::size_t TrialDataset::arm_count(int a) const {
  std::size_t c = 0;
  for (int v : arm) c += static_cast<std::size_t>(v == a);
  return c;
}

void TrialDataset::validate() const {
  const std::size_t m = arm.size();
  if (y1.size() != m || y2.size() != m)
    throw InvalidInput("trial dataset: outcome lengths differ from arm length");
  if (covariates.cols() > 0 && covariates.rows() != m)
    throw InvalidInput("trial dataset: covariate rows differ from arm length");
  if (covariate_names.size() != covariates.cols())
    throw InvalidInput("trial dataset: covariate name count mismatch");
  if (!(pi1 > 0.0) || !(pi1 < 1.0))
    throw InvalidInput("trial dataset: pi1 must lie in (0,1)");
  for (std::size_t i = 0; i < m; ++i) {
    if (arm[i] != 0 && arm[i] != 1)
      throw InvalidInput("trial dataset: arm values must be 0 or 1");
    if (!std::isfinite(y1[i]) || !std::isfinite(y2[i]))
      throw InvalidInput("trial dataset: non-finite outcome");
  }
  for (double v : covariates.data())
    if (!std::isfinite(v))
      throw InvalidInput("trial dataset: non-finite covariate");
}

}  // namespace xover
