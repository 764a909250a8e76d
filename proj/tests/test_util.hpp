#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <doctest.h>

#include "xover/trial_data.hpp"

#define CHECK_NEAR(a, b, tol)                              \
  do {                                                     \
    double check_near_a = (a);                             \
    double check_near_b = (b);                             \
    double check_near_t = (tol);                           \
    INFO("lhs=" << check_near_a << " rhs=" << check_near_b \
                << " tol=" << check_near_t);               \
    CHECK(std::fabs(check_near_a - check_near_b) <= check_near_t); \
  } while (0)

namespace testutil {

// Builds a trial dataset from parallel vectors; covariates optional, given
// column-wise.
inline xover::TrialDataset make_dataset(
    std::vector<int> arm, std::vector<double> y1, std::vector<double> y2,
    std::vector<std::vector<double>> x_columns = {}, double pi1 = 0.5) {
  xover::TrialDataset ds;
  ds.arm = std::move(arm);
  ds.y1 = std::move(y1);
  ds.y2 = std::move(y2);
  ds.pi1 = pi1;
  const std::size_t n = ds.arm.size();
  const std::size_t d = x_columns.size();
  ds.covariates = xover::Matrix(n, d);
  for (std::size_t j = 0; j < d; ++j) {
    REQUIRE(x_columns[j].size() == n);
    for (std::size_t i = 0; i < n; ++i) ds.covariates(i, j) = x_columns[j][i];
    ds.covariate_names.push_back("x_c" + std::to_string(j));
  }
  return ds;
}

}  // namespace testutil
