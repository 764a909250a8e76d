#include <benchmark/benchmark.h>

#include "xover/estimators.hpp"
#include "xover/numerics.hpp"
#include "xover/rng.hpp"
#include "xover/simulation.hpp"

namespace {

using namespace xover;

void BM_normal_cdf(benchmark::State& state) {
  double z = -3.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(numerics::normal_cdf(z));
    z += 1e-9;
  }
}
BENCHMARK(BM_normal_cdf);

void BM_normal_quantile(benchmark::State& state) {
  double p = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(numerics::normal_quantile(p));
    p = p < 0.99 ? p + 1e-9 : 0.01;
  }
}
BENCHMARK(BM_normal_quantile);

void BM_stream_normal(benchmark::State& state) {
  rng::Stream stream(7);
  for (auto _ : state) benchmark::DoNotOptimize(stream.normal());
}
BENCHMARK(BM_stream_normal);

void BM_gaussian_dgp(benchmark::State& state) {
  GaussianDgpParams p;
  p.theta1 = p.theta2_tilde = 0.3;
  p.lambda0 = p.lambda1 = 0.1;
  p.n = static_cast<std::size_t>(state.range(0));
  rng::Stream stream(11);
  for (auto _ : state) benchmark::DoNotOptimize(gaussian_dgp(p, stream));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_gaussian_dgp)->Arg(500);

void BM_theta_cr(benchmark::State& state) {
  GaussianDgpParams p;
  p.theta1 = p.theta2_tilde = 0.3;
  p.n = static_cast<std::size_t>(state.range(0));
  TrialDataset ds = gaussian_dgp(p, 17u).observed;
  for (auto _ : state) benchmark::DoNotOptimize(theta_cr(ds));
}
BENCHMARK(BM_theta_cr)->Arg(500);

void BM_theta_cr_adj(benchmark::State& state) {
  GaussianDgpParams p;
  p.theta1 = p.theta2_tilde = 0.3;
  p.b = 1.0 / 3.0;
  p.n = static_cast<std::size_t>(state.range(0));
  TrialDataset ds = gaussian_dgp(p, 17u).observed;
  for (auto _ : state) benchmark::DoNotOptimize(theta_cr_adj(ds));
}
BENCHMARK(BM_theta_cr_adj)->Arg(500);

void BM_logistic_fit_cohort(benchmark::State& state) {
  CohortData cohort = synthetic_cohort();
  for (auto _ : state)
    benchmark::DoNotOptimize(numerics::logistic_fit(cohort.covariates,
                                                    cohort.y0));
}
BENCHMARK(BM_logistic_fit_cohort);

void BM_resampled_cohort(benchmark::State& state) {
  ResampleDgpConfig cfg;
  cfg.cohort = synthetic_cohort();
  cfg.theta = 0.10;
  cfg.n = 380;
  BaselineFit baseline = fit_baseline_model(cfg.cohort);
  rng::Stream stream(23);
  for (auto _ : state)
    benchmark::DoNotOptimize(build_resampled_cohort(cfg, baseline, stream));
}
BENCHMARK(BM_resampled_cohort);

}  // namespace

BENCHMARK_MAIN();
