#include "xover/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "xover/errors.hpp"

namespace xover {

// --------------------------- Gaussian DGP ----------------------------------

GaussianTruths gaussian_dgp_truths(const GaussianDgpParams& p) {
  GaussianTruths t;
  // Var(Y1) = 3 covariates + noise = 4; Var(Y2) = 2 + b^2 + noise;
  // Cov(Y1, Y2) = 2 + b.  The period difference then has variance
  // 4 + (b^2+3) - 2(b+2) = (1-b)^2 + 2, and adjusting away the covariates
  // leaves the two unit noises.
  t.sigma2_y = 4.0;
  t.sigma2_pr = 16.0;
  t.sigma2_pr_adj = 4.0;
  t.sigma2_cr = (1.0 - p.b) * (1.0 - p.b) + 2.0;
  t.sigma2_cr_adj = 2.0;
  t.rho = (p.b + 2.0) / std::sqrt(4.0 * (p.b * p.b + 3.0));
  return t;
}

GaussianDraw gaussian_dgp(const GaussianDgpParams& p, rng::Stream& stream) {
  if (p.n < 4) throw InvalidInput("gaussian_dgp: n must be at least 4");
  if (!(p.pi1 > 0.0) || !(p.pi1 < 1.0))
    throw InvalidInput("gaussian_dgp: pi1 must lie in (0,1)");

  GaussianDraw out;
  PotentialCohort& c = out.cohort;
  c.covariates = Matrix(p.n, 3);
  c.covariate_names = {"x1", "x2", "x3"};
  c.y1_0.resize(p.n);
  c.y1_1.resize(p.n);
  c.y2_00.resize(p.n);
  c.y2_10.resize(p.n);
  c.y2_11.resize(p.n);
  c.y2_01.resize(p.n);

  TrialDataset& d = out.observed;
  d.arm.resize(p.n);
  d.y1.resize(p.n);
  d.y2.resize(p.n);
  d.covariate_names = c.covariate_names;
  d.pi1 = p.pi1;

  for (std::size_t i = 0; i < p.n; ++i) {
    double x1 = stream.normal();
    double x2 = stream.normal();
    double x3 = stream.normal();
    double e1 = stream.normal();
    double e2 = stream.normal();
    double e3 = stream.normal();
    double e4 = stream.normal();

    double base1 = x1 + x2 + x3;
    double base2 = x1 + x2 + p.b * x3;

    c.covariates(i, 0) = x1;
    c.covariates(i, 1) = x2;
    c.covariates(i, 2) = x3;

    c.y1_0[i] = base1 + e1;
    c.y1_1[i] = p.theta1 + base1 + e2;
    c.y2_10[i] = p.tau_tilde + p.lambda0 + base2 + e3;
    c.y2_01[i] = p.tau_tilde + p.theta2_tilde - p.lambda1 + base2 + e4;
    // The never-observed second-period outcomes share the realized noise of
    // their observed counterparts, shifted to the matching mean.
    c.y2_00[i] = c.y2_10[i] - p.lambda0;
    c.y2_11[i] = c.y2_01[i] + p.lambda1;

    int a = stream.bernoulli(p.pi1) ? 1 : 0;
    d.arm[i] = a;
    d.y1[i] = a == 1 ? c.y1_1[i] : c.y1_0[i];
    d.y2[i] = a == 1 ? c.y2_10[i] : c.y2_01[i];
  }

  d.covariates = c.covariates;
  return out;
}

GaussianDraw gaussian_dgp(const GaussianDgpParams& p, std::uint64_t seed) {
  rng::Stream stream(seed);
  return gaussian_dgp(p, stream);
}

// ---------------------- Correlated Bernoulli pairs -------------------------

namespace {
void check_prob_open(double p, const char* name) {
  if (!(p > 0.0) || !(p < 1.0))
    throw InvalidInput(std::string(name) + " must lie in (0,1)");
}
}  // namespace

double BinaryCorrelationSpec::rho_lower() const {
  double q1 = 1.0 - p1, q2 = 1.0 - p2;
  return std::max(-std::sqrt(p1 * p2 / (q1 * q2)),
                  -std::sqrt(q1 * q2 / (p1 * p2)));
}

double BinaryCorrelationSpec::rho_upper() const {
  double q1 = 1.0 - p1, q2 = 1.0 - p2;
  return std::min(std::sqrt(p1 * q2 / (p2 * q1)),
                  std::sqrt(p2 * q1 / (p1 * q2)));
}

void BinaryCorrelationSpec::validate() const {
  check_prob_open(p1, "p1");
  check_prob_open(p2, "p2");
  if (!std::isfinite(rho)) throw InvalidInput("rho must be finite");
  if (!(rho > rho_lower()) || !(rho < rho_upper()))
    throw InfeasibleCorrelation(
        "correlation " + std::to_string(rho) +
        " incompatible with marginals (" + std::to_string(p1) + ", " +
        std::to_string(p2) + "); feasible open interval is (" +
        std::to_string(rho_lower()) + ", " + std::to_string(rho_upper()) + ")");
}

double BinaryCorrelationSpec::joint11() const {
  return rho * std::sqrt(p1 * (1.0 - p1) * p2 * (1.0 - p2)) + p1 * p2;
}

double BinaryCorrelationSpec::cond_given_1() const { return joint11() / p1; }

double BinaryCorrelationSpec::cond_given_0() const {
  return (p2 - joint11()) / (1.0 - p1);
}

int correlated_bernoulli(const BinaryCorrelationSpec& spec, int z1,
                         rng::Stream& stream) {
  spec.validate();
  if (z1 != 0 && z1 != 1)
    throw InvalidInput("correlated_bernoulli: z1 must be 0 or 1");
  double p = z1 == 1 ? spec.cond_given_1() : spec.cond_given_0();
  return stream.bernoulli(p) ? 1 : 0;
}

// ----------------------- Cohort-resampling DGP -----------------------------

double CohortData::baseline_mean() const {
  if (y0.empty()) throw InvalidInput("cohort is empty");
  double s = 0.0;
  for (int v : y0) s += static_cast<double>(v);
  return s / static_cast<double>(y0.size());
}

BaselineFit fit_baseline_model(const CohortData& cohort) {
  if (cohort.y0.empty()) throw InvalidInput("cohort is empty");
  BaselineFit fit;
  // Keep a finite best-effort fit if a rare covariate separates; discarding
  // the cohort over a zero cell would be harsher than any standard GLM.
  fit.model = numerics::logistic_fit(cohort.covariates, cohort.y0, nullptr,
                                     numerics::SeparationPolicy::stop_and_keep);
  double s = 0.0;
  for (std::size_t i = 0; i < cohort.n(); ++i)
    s += numerics::expit(fit.model.linear_predictor(cohort.covariates.row_ptr(i)));
  fit.fitted_mean = s / static_cast<double>(cohort.n());
  return fit;
}

namespace {

// Calibrates an intercept for `slopes` so the cohort-mean probability hits
// `target`, then draws one Bernoulli outcome per subject.  Draw order is
// subject order; exactly n uniforms are consumed.
std::vector<double> calibrated_draws(const Matrix& covariates,
                                     const std::vector<double>& slopes,
                                     double target, const char* label,
                                     rng::Stream& stream,
                                     CohortBuildTrace* trace) {
  double a = numerics::calibrate_intercept(slopes, covariates, target);
  const std::size_t n = covariates.rows();
  std::vector<double> probs(n);
  double achieved = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double eta = a;
    for (std::size_t j = 0; j < slopes.size(); ++j)
      eta += slopes[j] * covariates(i, j);
    probs[i] = numerics::expit(eta);
    achieved += probs[i];
  }
  achieved /= static_cast<double>(n);
  if (trace)
    trace->calibrations.push_back({label, a, target, achieved, slopes});

  std::vector<double> draws(n);
  for (std::size_t i = 0; i < n; ++i)
    draws[i] = stream.bernoulli(probs[i]) ? 1.0 : 0.0;
  return draws;
}

}  // namespace

PotentialCohort build_resampled_cohort(const ResampleDgpConfig& config,
                                       const BaselineFit& baseline,
                                       rng::Stream& stream,
                                       CohortBuildTrace* trace) {
  const CohortData& cohort = config.cohort;
  const std::size_t n = cohort.n();
  if (n == 0) throw InvalidInput("build_resampled_cohort: empty cohort");

  PotentialCohort out;
  out.covariates = cohort.covariates;
  out.covariate_names = cohort.covariate_names;
  out.y1_0.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    out.y1_0[i] = static_cast<double>(cohort.y0[i]);

  // Treated first-period outcomes: baseline covariate profile, intercept
  // recalibrated so the mean probability sits theta above the baseline
  // model's fitted mean.
  out.y1_1 = calibrated_draws(cohort.covariates, baseline.model.slopes,
                              baseline.fitted_mean + config.theta, "y1_1",
                              stream, trace);

  // Control second-period outcomes: correlated flip of the realized baseline
  // with a drifted marginal.
  double p1 = cohort.baseline_mean();
  BinaryCorrelationSpec corr{p1, p1 + config.tau_tilde, config.rho};
  corr.validate();
  out.y2_00.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    out.y2_00[i] = static_cast<double>(
        correlated_bernoulli(corr, cohort.y0[i], stream));

  // Second-period covariate model refitted on the freshly drawn control
  // outcomes; remaining potential outcomes shift its mean by the requested
  // offsets.
  std::vector<int> y2_00_int(n);
  for (std::size_t i = 0; i < n; ++i)
    y2_00_int[i] = static_cast<int>(out.y2_00[i]);
  // stop_and_keep: with rare binary covariates, a fair share of replications
  // draw a zero cell and would otherwise die on quasi-separation.
  LogisticModel m2 =
      numerics::logistic_fit(cohort.covariates, y2_00_int, nullptr,
                             numerics::SeparationPolicy::stop_and_keep);
  double m2_mean = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    m2_mean += numerics::expit(m2.linear_predictor(cohort.covariates.row_ptr(i)));
  m2_mean /= static_cast<double>(n);

  out.y2_10 = calibrated_draws(cohort.covariates, m2.slopes,
                               m2_mean + config.lambda, "y2_10", stream, trace);
  out.y2_01 =
      calibrated_draws(cohort.covariates, m2.slopes,
                       m2_mean + config.theta - config.lambda, "y2_01", stream,
                       trace);
  out.y2_11 = calibrated_draws(cohort.covariates, m2.slopes,
                               m2_mean + config.theta, "y2_11", stream, trace);
  return out;
}

PotentialCohort build_resampled_cohort(const ResampleDgpConfig& config,
                                       std::uint64_t seed,
                                       CohortBuildTrace* trace) {
  BaselineFit baseline = fit_baseline_model(config.cohort);
  rng::Stream stream(seed);
  return build_resampled_cohort(config, baseline, stream, trace);
}

TrialDataset draw_trial(const PotentialCohort& cohort, std::size_t n,
                        double pi1, rng::Stream& stream) {
  if (cohort.n() == 0) throw InvalidInput("draw_trial: empty cohort");
  if (n < 4) throw InvalidInput("draw_trial: n must be at least 4");
  if (!(pi1 > 0.0) || !(pi1 < 1.0))
    throw InvalidInput("draw_trial: pi1 must lie in (0,1)");

  const std::size_t d = cohort.covariates.cols();
  TrialDataset out;
  out.arm.resize(n);
  out.y1.resize(n);
  out.y2.resize(n);
  out.covariates = Matrix(n, d);
  out.covariate_names = cohort.covariate_names;
  out.pi1 = pi1;

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t i = stream.uniform_below(cohort.n());
    int a = stream.bernoulli(pi1) ? 1 : 0;
    out.arm[k] = a;
    for (std::size_t j = 0; j < d; ++j)
      out.covariates(k, j) = cohort.covariates(i, j);
    if (a == 1) {
      out.y1[k] = cohort.y1_1[i];
      out.y2[k] = cohort.y2_10[i];
    } else {
      out.y1[k] = cohort.y1_0[i];
      out.y2[k] = cohort.y2_01[i];
    }
  }
  return out;
}

// --------------------------- Synthetic cohort ------------------------------

CohortData synthetic_cohort(std::uint64_t seed) {
  constexpr std::size_t kN = 336;
  rng::Stream stream(seed);

  CohortData c;
  c.covariate_names = {"x_age",       "x_marital_married",
                       "x_marital_living", "x_marital_partner",
                       "x_gonorrhea", "x_chlamydia"};
  c.covariates = Matrix(kN, 6);
  c.y0.resize(kN);

  for (std::size_t i = 0; i < kN; ++i) {
    // Integer age, bell-shaped around the mid-twenties, adults only.
    double age;
    do {
      age = std::round(26.5 + 5.89 * stream.normal());
    } while (age < 18.0);

    // Marital status: married / living with partner / has partner, not
    // cohabiting / single (reference).
    double u = stream.uniform01();
    double married = u < 0.116 ? 1.0 : 0.0;
    double living = (u >= 0.116 && u < 0.205) ? 1.0 : 0.0;
    double partner = (u >= 0.205 && u < 0.714) ? 1.0 : 0.0;

    double gonorrhea = stream.bernoulli(20.0 / 336.0) ? 1.0 : 0.0;
    double chlamydia = stream.bernoulli(54.0 / 336.0) ? 1.0 : 0.0;

    c.covariates(i, 0) = age;
    c.covariates(i, 1) = married;
    c.covariates(i, 2) = living;
    c.covariates(i, 3) = partner;
    c.covariates(i, 4) = gonorrhea;
    c.covariates(i, 5) = chlamydia;
  }

  // Baseline outcome: logistic in the covariates, intercept calibrated so
  // the cohort-mean probability is 18.5%.
  std::vector<double> slopes = {0.05, 0.25, 0.10, -0.15, -0.50, -0.35};
  double a = numerics::calibrate_intercept(slopes, c.covariates, 0.185);
  for (std::size_t i = 0; i < kN; ++i) {
    double eta = a;
    for (std::size_t j = 0; j < slopes.size(); ++j)
      eta += slopes[j] * c.covariates(i, j);
    c.y0[i] = stream.bernoulli(numerics::expit(eta)) ? 1 : 0;
  }
  return c;
}

}  // namespace xover
