#include "xover/power_study.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "xover/errors.hpp"
#include "xover/estimators.hpp"
#include "xover/rng.hpp"

namespace xover {

namespace {

// Draws one observed trial for replication use, redrawing (from the same
// continuing stream) when randomization leaves an arm with fewer than two
// subjects.
TrialDataset draw_dataset(const PowerStudyConfig& cfg,
                          const BaselineFit* baseline, rng::Stream& stream,
                          std::size_t* redraws) {
  for (std::size_t attempt = 0; attempt <= cfg.max_redraws; ++attempt) {
    TrialDataset ds;
    if (cfg.dgp == DgpKind::gaussian) {
      GaussianDgpParams p = cfg.gaussian;
      p.n = cfg.design.n;
      p.pi1 = cfg.design.pi1;
      ds = gaussian_dgp(p, stream).observed;
    } else {
      ResampleDgpConfig rc = cfg.resample;
      rc.n = cfg.design.n;
      rc.pi1 = cfg.design.pi1;
      // The whole potential cohort is rebuilt each replication, so the
      // simulated power reflects model-refit noise, not just trial noise.
      PotentialCohort cohort =
          build_resampled_cohort(rc, *baseline, stream, nullptr);
      ds = draw_trial(cohort, rc.n, rc.pi1, stream);
    }
    if (ds.arm_count(1) >= 2 && ds.arm_count(0) >= 2) return ds;
    ++*redraws;
  }
  throw EmptyArm("power study: an arm stayed near-empty after " +
                 std::to_string(cfg.max_redraws) + " redraws");
}

}  // namespace

PowerStudyResult run_power_study(const PowerStudyConfig& config) {
  const std::size_t reps = config.replications;
  const std::size_t ntests = config.tests.size();
  if (reps == 0) throw InvalidInput("power study: replications must be >= 1");
  if (ntests == 0) throw InvalidInput("power study: no tests requested");
  if (config.design.n < 4)
    throw InvalidInput("power study: design.n must be at least 4");

  BaselineFit baseline;
  if (config.dgp == DgpKind::resample)
    baseline = fit_baseline_model(config.resample.cohort);

  // Per-replication slots, filled by whichever thread runs the replication.
  std::vector<unsigned char> reject(reps * ntests, 0);
  std::vector<double> estimates(reps * ntests, 0.0);
  std::vector<double> avars(reps * ntests, 0.0);
  std::vector<std::size_t> redraw_counts(reps, 0);

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  auto worker = [&]() {
    for (;;) {
      std::size_t r = next.fetch_add(1);
      if (r >= reps) return;
      try {
        rng::Stream stream(rng::derive_seed(config.seed, r));
        TrialDataset ds =
            draw_dataset(config, &baseline, stream, &redraw_counts[r]);
        for (std::size_t t = 0; t < ntests; ++t) {
          EstimateReport report = estimate(ds, config.tests[t]);
          TestOutcome outcome = one_sided_test(report, config.design);
          reject[r * ntests + t] = outcome.reject ? 1 : 0;
          estimates[r * ntests + t] = report.estimate;
          avars[r * ntests + t] = report.asymptotic_variance;
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(reps);  // stop remaining work
        return;
      }
    }
  };

  unsigned nthreads = config.threads != 0
                          ? config.threads
                          : std::max(1u, std::thread::hardware_concurrency());
  nthreads = static_cast<unsigned>(
      std::min<std::size_t>(nthreads, reps));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (unsigned i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  // Sequential reduction in replication order keeps results bit-identical
  // across thread counts.
  PowerStudyResult result;
  result.replications = reps;
  result.seed = config.seed;
  for (std::size_t r = 0; r < reps; ++r) result.redraws += redraw_counts[r];

  result.tests.resize(ntests);
  for (std::size_t t = 0; t < ntests; ++t) {
    TestTally& tally = result.tests[t];
    tally.method = config.tests[t];
    double est_sum = 0.0, avar_sum = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      tally.rejections += reject[r * ntests + t];
      est_sum += estimates[r * ntests + t];
      avar_sum += avars[r * ntests + t];
    }
    double R = static_cast<double>(reps);
    tally.power = static_cast<double>(tally.rejections) / R;
    tally.mc_se = std::sqrt(tally.power * (1.0 - tally.power) / R);
    tally.mean_estimate = est_sum / R;
    tally.mean_asymptotic_variance = avar_sum / R;
    double q = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      double dev = estimates[r * ntests + t] - tally.mean_estimate;
      q += dev * dev;
    }
    tally.estimate_mc_se =
        reps > 1 ? std::sqrt(q / (R - 1.0) / R) : 0.0;
  }
  return result;
}

}  // namespace xover
