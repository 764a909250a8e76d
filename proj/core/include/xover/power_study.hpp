#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "xover/inference.hpp"
#include "xover/simulation.hpp"
#include "xover/trial_data.hpp"

namespace xover {

enum class DgpKind { gaussian, resample };

// A Monte Carlo power study: repeatedly draw a trial from the chosen
// data-generating process, apply each requested test, and tally rejections.
//
// Determinism contract: replication r always runs on its own stream seeded
// by derive_seed(seed, r), and per-replication results land in
// pre-allocated slots that are reduced in replication order afterwards.
// The result is therefore a pure function of the config, independent of
// thread count and scheduling.
struct PowerStudyConfig {
  DgpKind dgp = DgpKind::gaussian;
  GaussianDgpParams gaussian;
  ResampleDgpConfig resample;
  DesignParams design;  // design.n is the trial size drawn per replication
  std::vector<Method> tests;
  std::size_t replications = 1000;
  std::uint64_t seed = 0;
  unsigned threads = 0;          // 0 = one worker per hardware thread
  std::size_t max_redraws = 10;  // retries when an arm comes up near-empty
};

struct TestTally {
  Method method = Method::cr;
  std::size_t rejections = 0;
  double power = 0.0;
  double mc_se = 0.0;  // binomial s.e. of `power`
  double mean_estimate = 0.0;
  double estimate_mc_se = 0.0;
  double mean_asymptotic_variance = 0.0;
};

struct PowerStudyResult {
  std::vector<TestTally> tests;
  std::size_t replications = 0;
  std::uint64_t seed = 0;
  std::size_t redraws = 0;  // total empty-arm redraws across replications
};

PowerStudyResult run_power_study(const PowerStudyConfig& config);

}  // namespace xover
