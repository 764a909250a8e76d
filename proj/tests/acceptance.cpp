// Acceptance gate: each numbered criterion prints one [PASS]/[FAIL] line and
// the process exits nonzero if any criterion fails.  Heavy Monte Carlo work
// (the 32-cell, 10,000-replication grid study) is shared between criteria.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "xover/errors.hpp"
#include "xover/estimators.hpp"
#include "xover/inference.hpp"
#include "xover/power_study.hpp"
#include "xover/rng.hpp"
#include "xover/simulation.hpp"
#include "xover/trial_data.hpp"

#include "oracles.hpp"

namespace {

using xover::DesignParams;
using xover::GaussianDgpParams;
using xover::Method;
using xover::TrialDataset;

// Pinned master seeds.  The statistical tolerances below are 3-sigma bands,
// so a fixed seed keeps the gate reproducible instead of flaky.
constexpr std::uint64_t kMomentSeed = 20260814u;
constexpr std::uint64_t kGridSeed = 20260816u;
constexpr std::uint64_t kDominanceSeed = 6u;
constexpr std::uint64_t kCorrSeed = 17u;
constexpr std::uint64_t kIdentitySeed = 8u;
constexpr std::uint64_t kTraceSeed = 9u;

class Checker {
 public:
  void require(bool cond, const std::string& what) {
    if (!cond && ok_) failure_ = what;
    ok_ = ok_ && cond;
  }
  template <typename... Args>
  void note(const char* fmt, Args... args) {
    char buf[256];
    if constexpr (sizeof...(Args) == 0)
      std::snprintf(buf, sizeof(buf), "%s", fmt);
    else
      std::snprintf(buf, sizeof(buf), fmt, args...);
    if (!notes_.empty()) notes_ += ", ";
    notes_ += buf;
  }
  bool ok() const { return ok_; }
  const std::string& failure() const { return failure_; }
  const std::string& notes() const { return notes_; }

 private:
  bool ok_ = true;
  std::string failure_;
  std::string notes_;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Shared 32-cell grid study: theta x lambda x slope, 10,000 replications of
// n=500 trials, all four tests.
// ---------------------------------------------------------------------------

constexpr double kGridThetas[] = {0.0, 0.1, 0.3, 0.5};
constexpr double kGridLambdas[] = {-0.1, 0.0, 0.1, 0.3};
constexpr double kGridBs[] = {0.0, 1.0 / 3.0};
constexpr std::size_t kGridReps = 10000;
constexpr std::size_t kGridN = 500;

struct GridCell {
  double theta = 0.0;
  double lambda = 0.0;
  double b = 0.0;
  xover::GaussianTruths truths;
  xover::PowerStudyResult result;
};

struct GridStudy {
  std::vector<GridCell> cells;
};

GridStudy build_grid_study() {
  GridStudy study;
  const DesignParams design{kGridN, 0.5, 0.025, 0.0};
  std::uint64_t index = 0;
  for (double b : kGridBs) {
    for (double lambda : kGridLambdas) {
      for (double theta : kGridThetas) {
        GridCell cell;
        cell.theta = theta;
        cell.lambda = lambda;
        cell.b = b;
        GaussianDgpParams p{theta, theta, 0.0, lambda, lambda, b, kGridN, 0.5};
        cell.truths = xover::gaussian_dgp_truths(p);

        xover::PowerStudyConfig pc;
        pc.dgp = xover::DgpKind::gaussian;
        pc.gaussian = p;
        pc.design = design;
        pc.tests = {Method::pr, Method::pr_adj, Method::cr, Method::cr_adj};
        pc.replications = kGridReps;
        pc.seed = xover::rng::derive_seed(kGridSeed, index++);
        cell.result = xover::run_power_study(pc);
        study.cells.push_back(std::move(cell));
      }
    }
  }
  return study;
}

const GridStudy* grid_study(std::string* error) {
  static GridStudy study;
  static std::string build_error;
  static bool built = [] {
    try {
      study = build_grid_study();
      return true;
    } catch (const std::exception& e) {
      build_error = e.what();
      return false;
    }
  }();
  if (!built) {
    if (error) *error = build_error;
    return nullptr;
  }
  return &study;
}

const xover::TestTally& tally_for(const xover::PowerStudyResult& r, Method m) {
  for (const auto& t : r.tests)
    if (t.method == m) return t;
  throw std::logic_error("tally missing");
}

double analytic_power(const GridCell& cell, Method m,
                      const DesignParams& design) {
  switch (m) {
    case Method::pr:
      return xover::power_parallel(cell.theta, cell.truths.sigma2_pr, design);
    case Method::pr_adj:
      return xover::power_parallel(cell.theta, cell.truths.sigma2_pr_adj,
                                   design);
    case Method::cr:
      return xover::power_crossover(cell.theta, 2.0 * cell.lambda,
                                    cell.truths.sigma2_cr, design);
    case Method::cr_adj:
      return xover::power_crossover(cell.theta, 2.0 * cell.lambda,
                                    cell.truths.sigma2_cr_adj, design);
    default:
      throw std::logic_error("unexpected method");
  }
}

// ---------------------------------------------------------------------------
// Small local helpers
// ---------------------------------------------------------------------------

double sample_var(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return ss / static_cast<double>(v.size() - 1);
}

double sample_cov(const std::vector<double>& a, const std::vector<double>& b) {
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(a.size());
  mb /= static_cast<double>(b.size());
  double ss = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) ss += (a[i] - ma) * (b[i] - mb);
  return ss / static_cast<double>(a.size() - 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

// ---------------------------------------------------------------------------
// Criterion 1: closed-form variance truths and 100k-subject empirical moments
// ---------------------------------------------------------------------------

void criterion1(Checker& c) {
  auto t0 = std::chrono::steady_clock::now();

  for (double b : {0.0, 0.25, 1.0 / 3.0, 1.0}) {
    GaussianDgpParams p;
    p.b = b;
    auto t = xover::gaussian_dgp_truths(p);
    c.require(t.sigma2_pr == 16.0, "sigma2_pr != 16 at b=" + fmt(b));
    c.require(t.sigma2_pr_adj == 4.0, "sigma2_pr_adj != 4 at b=" + fmt(b));
    c.require(std::abs(t.sigma2_cr - ((1.0 - b) * (1.0 - b) + 2.0)) < 1e-15,
              "sigma2_cr != (1-b)^2+2 at b=" + fmt(b));
    c.require(t.sigma2_cr_adj == 2.0, "sigma2_cr_adj != 2 at b=" + fmt(b));
  }

  const double b = 1.0 / 3.0;
  GaussianDgpParams p{0.3, 0.3, 0.0, 0.1, 0.1, b, 100000, 0.5};
  auto truths = xover::gaussian_dgp_truths(p);
  auto draw = xover::gaussian_dgp(p, kMomentSeed);
  const TrialDataset& ds = draw.observed;

  const double tol = 0.1;
  auto check_avar = [&](Method m, double want, const char* name) {
    double got = xover::estimate(ds, m).asymptotic_variance;
    c.require(std::abs(got - want) <= tol,
              std::string("empirical avar ") + name + " = " + fmt(got) +
                  ", want " + fmt(want) + " +- 0.1");
    return got;
  };
  double a_pr = check_avar(Method::pr, truths.sigma2_pr, "pr");
  check_avar(Method::pr_adj, truths.sigma2_pr_adj, "pr_adj");
  double a_cr = check_avar(Method::cr, truths.sigma2_cr, "cr");
  check_avar(Method::cr_adj, truths.sigma2_cr_adj, "cr_adj");

  // Within-arm second moments of the observed outcomes.
  std::vector<double> y1a, y2a;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    if (ds.arm[i] == 1) {
      y1a.push_back(ds.y1[i]);
      y2a.push_back(ds.y2[i]);
    }
  }
  double v1 = sample_var(y1a);
  double v2 = sample_var(y2a);
  double cv = sample_cov(y1a, y2a);
  c.require(std::abs(v1 - truths.sigma2_y) <= tol,
            "Var(y1) = " + fmt(v1) + ", want 4 +- 0.1");
  c.require(std::abs(v2 - (3.0 + b * b)) <= tol,
            "Var(y2) = " + fmt(v2) + ", want " + fmt(3.0 + b * b) + " +- 0.1");
  c.require(std::abs(cv - (2.0 + b)) <= tol,
            "Cov(y1,y2) = " + fmt(cv) + ", want " + fmt(2.0 + b) + " +- 0.1");
  double corr = cv / std::sqrt(v1 * v2);
  c.require(std::abs(corr - truths.rho) <= tol,
            "Corr(y1,y2) = " + fmt(corr) + ", want " + fmt(truths.rho));

  double dt = seconds_since(t0);
  c.require(dt < 10.0, "runtime " + fmt(dt) + "s >= 10s");
  c.note("avar_pr=%.3f avar_cr=%.3f, %.2fs", a_pr, a_cr, dt);
}

// ---------------------------------------------------------------------------
// Criterion 2: analytic power curve spot values against the erf oracle
// ---------------------------------------------------------------------------

long double oracle_power(long double theta, long double carry_sum,
                         long double sigma2) {
  const long double z = oracle::normal_quantile(0.975L);
  return oracle::normal_cdf(std::sqrt(500.0L) * (theta - carry_sum / 2.0L) /
                                std::sqrt(sigma2) -
                            z);
}

void criterion2(Checker& c) {
  auto t0 = std::chrono::steady_clock::now();
  xover::cli::PowerOptions opts;  // default grid: theta 0..0.5, 4 lambdas, 2 slopes
  const std::string csv = xover::cli::cmd_power(opts);
  c.require(xover::cli::cmd_power(opts) == csv, "repeat run changed bytes");

  struct Row {
    double theta, lambda, b, value;
    std::string test;
  };
  std::vector<Row> rows;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    auto f = split(line, ',');
    if (f.size() != 5) continue;
    rows.push_back(Row{std::strtod(f[0].c_str(), nullptr),
                       std::strtod(f[1].c_str(), nullptr),
                       std::strtod(f[2].c_str(), nullptr),
                       std::strtod(f[4].c_str(), nullptr), f[3]});
  }
  auto value = [&](double theta, double lambda, double b,
                   const std::string& test) {
    for (const auto& r : rows)
      if (r.theta == theta && r.lambda == lambda && r.b == b && r.test == test)
        return r.value;
    throw std::runtime_error("row not found: " + test);
  };

  struct Spot {
    double theta, lambda;
    const char* test;
    long double carry, sigma2;
    double printed;
  };
  // Printed reference values carry only 3-4 significant digits; the oracle
  // comparison is the sharp one.
  const Spot spots[] = {
      {0.0, 0.1, "cr", 0.2L, 3.0L, 5.77e-4},
      {0.3, 0.1, "cr", 0.2L, 3.0L, 0.7330},
      {0.3, 0.1, "pr", 0.0L, 16.0L, 0.3886},
      {0.3, 0.1, "cr_adj", 0.2L, 2.0L, 0.8854},
  };
  for (const auto& s : spots) {
    double got = value(s.theta, s.lambda, 0.0, s.test);
    double want = static_cast<double>(
        oracle_power(static_cast<long double>(s.theta), s.carry, s.sigma2));
    c.require(std::abs(got - s.printed) <= 1e-3,
              std::string(s.test) + "(" + fmt(s.theta) + ") = " + fmt(got) +
                  " vs printed " + fmt(s.printed));
    c.require(std::abs(got - want) <= 1e-9,
              std::string(s.test) + "(" + fmt(s.theta) + ") = " + fmt(got) +
                  " vs oracle " + fmt(want));
  }
  double dt = seconds_since(t0);
  c.require(dt < 1.0, "runtime " + fmt(dt) + "s >= 1s");
  c.note("4 spots within 1e-3 of printed and 1e-9 of oracle, %.3fs", dt);
}

// ---------------------------------------------------------------------------
// Criterion 3: Monte Carlo power matches analytic power over the full grid
// ---------------------------------------------------------------------------

void criterion3(Checker& c) {
  std::string err;
  const GridStudy* study = grid_study(&err);
  if (!study) {
    c.require(false, "grid study failed: " + err);
    return;
  }
  const DesignParams design{kGridN, 0.5, 0.025, 0.0};
  double worst_z = 0.0;
  for (const auto& cell : study->cells) {
    for (Method m : {Method::pr, Method::pr_adj, Method::cr, Method::cr_adj}) {
      double p = analytic_power(cell, m, design);
      double se =
          std::sqrt(p * (1.0 - p) / static_cast<double>(kGridReps));
      double got = tally_for(cell.result, m).power;
      double diff = std::abs(got - p);
      if (se > 0.0) worst_z = std::max(worst_z, diff / se);
      c.require(diff <= 3.0 * se + 1e-12,
                std::string(xover::method_name(m)) + " at theta=" +
                    fmt(cell.theta) + " lambda=" + fmt(cell.lambda) +
                    " b=" + fmt(cell.b) + ": mc=" + fmt(got) +
                    " analytic=" + fmt(p) + " (" + fmt(diff / se) + " se)");
    }
  }
  c.note("128 comparisons, worst |mc-analytic| = %.2f se", worst_z);
}

// ---------------------------------------------------------------------------
// Criterion 4: sample-size ratio identity and break-even thresholds
// ---------------------------------------------------------------------------

void criterion4(Checker& c) {
  for (double rho : {0.0, 0.3, 0.5, 0.7}) {
    // Equal per-period variance 1, within-subject correlation rho.
    double s2_cr = 2.0 * (1.0 - rho);
    double s2_pr = 4.0;
    auto cr = xover::sample_size(xover::SampleSizeKind::cr_no_carryover, 0.3,
                                 0.0, s2_cr, 0.025, 0.1);
    auto pr =
        xover::sample_size(xover::SampleSizeKind::pr, 0.3, 0.0, s2_pr, 0.025,
                           0.1);
    double ratio = cr.n_exact / pr.n_exact;
    c.require(std::abs(ratio - (1.0 - rho) / 2.0) <= 1e-12,
              "n_cr/n_pr at rho=" + fmt(rho) + " is " + fmt(ratio));
  }

  const double theta_alt = 0.25;
  const double printed[] = {0.41, 0.5, 0.61};
  const double rhos[] = {0.3, 0.5, 0.7};
  for (int i = 0; i < 3; ++i) {
    double s_cr = std::sqrt(2.0 * (1.0 - rhos[i]));
    double frac =
        xover::carryover_breakeven(theta_alt, s_cr, 2.0) / theta_alt;
    c.require(std::abs(frac - printed[i]) <= 0.005,
              "break-even fraction at rho=" + fmt(rhos[i]) + " is " +
                  fmt(frac) + ", want " + fmt(printed[i]) + " +- 0.005");
  }
  c.note("ratio identity to 1e-12 at 4 rhos; thresholds 0.41/0.50/0.61");
}

// ---------------------------------------------------------------------------
// Criterion 5: Monte Carlo mean of the crossover estimator tracks its target
// ---------------------------------------------------------------------------

void criterion5(Checker& c) {
  std::string err;
  const GridStudy* study = grid_study(&err);
  if (!study) {
    c.require(false, "grid study failed: " + err);
    return;
  }
  double worst_z = 0.0;
  double spot_mean = 0.0;
  for (const auto& cell : study->cells) {
    // Large-sample mean of the basic crossover estimator:
    // (theta1 + theta2_tilde - lambda0 - lambda1)/2 = theta - lambda here.
    double target = cell.theta - cell.lambda;
    const auto& t = tally_for(cell.result, Method::cr);
    double z = std::abs(t.mean_estimate - target) / t.estimate_mc_se;
    worst_z = std::max(worst_z, z);
    if (cell.theta == 0.3 && cell.lambda == 0.1 && cell.b == 0.0)
      spot_mean = t.mean_estimate;
    c.require(z <= 3.0, "mean estimate at theta=" + fmt(cell.theta) +
                            " lambda=" + fmt(cell.lambda) + " b=" +
                            fmt(cell.b) + " is " + fmt(t.mean_estimate) +
                            ", target " + fmt(target) + " (" + fmt(z) +
                            " se)");
  }
  c.note("32 cells, worst dev %.2f se; mean at (0.3,0.1) = %.4f (target 0.2)",
         worst_z, spot_mean);
}

// ---------------------------------------------------------------------------
// Criterion 6: adjusted variance never exceeds unadjusted; exact tie when the
// per-arm regressions are flat
// ---------------------------------------------------------------------------

void criterion6(Checker& c) {
  const std::size_t n_datasets = 1000;
  double worst_gap = -1e300;
  for (std::size_t r = 0; r < n_datasets; ++r) {
    double theta = kGridThetas[r % 4];
    double lambda = kGridLambdas[(r / 4) % 4];
    double b = kGridBs[(r / 16) % 2];
    GaussianDgpParams p{theta, theta, 0.0, lambda, lambda, b, kGridN, 0.5};
    auto draw = xover::gaussian_dgp(p, xover::rng::derive_seed(kDominanceSeed, r));
    double a_cr = xover::estimate(draw.observed, Method::cr).asymptotic_variance;
    double a_adj =
        xover::estimate(draw.observed, Method::cr_adj).asymptotic_variance;
    worst_gap = std::max(worst_gap, a_adj - a_cr);
    c.require(a_adj <= a_cr + 1e-9,
              "dataset " + std::to_string(r) + ": adjusted " + fmt(a_adj) +
                  " > unadjusted " + fmt(a_cr));
  }

  // Constant within-arm differences: both per-arm regressions are exactly
  // flat, so adjustment changes nothing and the two variances tie bit-for-bit.
  TrialDataset ds;
  ds.arm = {1, 1, 1, 0, 0, 0};
  ds.y2 = {0.5, -1.25, 2.0, 0.75, 3.5, -2.0};
  for (std::size_t i = 0; i < 6; ++i)
    ds.y1.push_back(ds.y2[i] + (ds.arm[i] == 1 ? 2.5 : -1.0));
  ds.covariates = xover::Matrix(6, 1);
  const double xs[] = {-1.0, 0.0, 1.0, 2.0, -2.0, 0.5};
  for (std::size_t i = 0; i < 6; ++i) ds.covariates(i, 0) = xs[i];
  ds.covariate_names = {"x_c0"};
  auto cr = xover::estimate(ds, Method::cr);
  auto adj = xover::estimate(ds, Method::cr_adj);
  c.require(adj.asymptotic_variance == cr.asymptotic_variance,
            "zero-slope case: expected exact equality, got " +
                fmt(adj.asymptotic_variance) + " vs " +
                fmt(cr.asymptotic_variance));
  c.require(adj.estimate == cr.estimate,
            "zero-slope case: estimates differ");
  c.note("%zu datasets, max(adj - unadj) = %.3g; zero-slope tie exact",
         n_datasets, worst_gap);
}

// ---------------------------------------------------------------------------
// Criterion 7: correlated Bernoulli pair law
// ---------------------------------------------------------------------------

void criterion7(Checker& c) {
  xover::BinaryCorrelationSpec spec{0.185, 0.135, 0.33};
  spec.validate();

  double marginal = spec.p1 * spec.cond_given_1() +
                    (1.0 - spec.p1) * spec.cond_given_0();
  c.require(std::abs(marginal - spec.p2) <= 1e-15,
            "P(Z2=1) = " + fmt(marginal) + ", want exactly " + fmt(spec.p2));
  c.require(std::abs(spec.cond_given_1() - 0.37169) <= 1e-5,
            "cond_given_1 = " + fmt(spec.cond_given_1()));
  c.require(std::abs(spec.cond_given_0() - 0.081273) <= 1e-5,
            "cond_given_0 = " + fmt(spec.cond_given_0()));

  auto rejects = [&](double rho) {
    xover::BinaryCorrelationSpec bad = spec;
    bad.rho = rho;
    try {
      bad.validate();
      return false;
    } catch (const xover::InfeasibleCorrelation&) {
      return true;
    }
  };
  c.require(rejects(0.9), "rho=0.9 beyond the upper bound was accepted");
  c.require(rejects(-0.6), "rho=-0.6 beyond the lower bound was accepted");
  c.require(rejects(spec.rho_upper()), "boundary rho accepted (open interval)");
  c.require(!rejects(spec.rho_upper() - 1e-9),
            "feasible rho just inside the bound rejected");

  const std::size_t draws = 1000000;
  xover::rng::Stream stream(kCorrSeed);
  double s1 = 0, s2 = 0, s11 = 0;
  for (std::size_t i = 0; i < draws; ++i) {
    int z1 = stream.bernoulli(spec.p1) ? 1 : 0;
    int z2 = xover::correlated_bernoulli(spec, z1, stream);
    s1 += z1;
    s2 += z2;
    s11 += z1 * z2;
  }
  double m1 = s1 / draws, m2 = s2 / draws;
  double corr = (s11 / draws - m1 * m2) /
                std::sqrt(m1 * (1 - m1) * m2 * (1 - m2));
  c.require(std::abs(corr - spec.rho) <= 0.005,
            "sampled correlation " + fmt(corr) + " vs " + fmt(spec.rho));
  c.note("marginal exact, corr at 1e6 draws = %.4f", corr);
}

// ---------------------------------------------------------------------------
// Criterion 8: crossover estimator == pooled-difference variant when n1 = n0
// ---------------------------------------------------------------------------

void criterion8(Checker& c) {
  xover::rng::Stream stream(kIdentitySeed);
  for (std::size_t r = 0; r < 1000; ++r) {
    std::size_t half = 2 + (r % 20);
    TrialDataset ds;
    ds.arm.assign(half, 1);
    ds.arm.insert(ds.arm.end(), half, 0);
    for (std::size_t i = ds.arm.size() - 1; i > 0; --i) {
      std::size_t j = stream.uniform_below(i + 1);
      std::swap(ds.arm[i], ds.arm[j]);
    }
    for (std::size_t i = 0; i < ds.arm.size(); ++i) {
      double base = stream.normal();
      ds.y2.push_back(base + stream.normal());
      ds.y1.push_back(base + stream.normal() +
                      (ds.arm[i] == 1 ? 0.4 : -0.1));
    }
    double cr = xover::estimate(ds, Method::cr).estimate;
    double alt = xover::estimate(ds, Method::cr_alt).estimate;
    c.require(cr == alt, "dataset " + std::to_string(r) + " (n=" +
                             std::to_string(2 * half) + "): " + fmt(cr) +
                             " != " + fmt(alt));
  }
  c.note("1000 equal-allocation datasets, bit-exact agreement");
}

// ---------------------------------------------------------------------------
// Criterion 9: resampling engine on the synthetic cohort
// ---------------------------------------------------------------------------

void criterion9(Checker& c) {
  const auto cohort = xover::synthetic_cohort();
  const auto baseline = xover::fit_baseline_model(cohort);
  const double theta = 0.10;

  // (a) every intercept calibration hits its target under independent
  // forward evaluation of the calibrated model over the cohort.
  auto sigmoid_mean = [&](const xover::CalibrationCheck& cal) {
    double sum = 0.0;
    for (std::size_t i = 0; i < cohort.n(); ++i) {
      double t = cal.intercept;
      for (std::size_t j = 0; j < cohort.covariates.cols(); ++j)
        t += cal.slopes[j] * cohort.covariates(i, j);
      sum += 1.0 / (1.0 + std::exp(-t));
    }
    return sum / static_cast<double>(cohort.n());
  };

  double worst_cal = 0.0;
  int scenario = 0;
  for (double lambda : {0.0, theta / 2.0}) {
    xover::ResampleDgpConfig rc{cohort, theta, lambda, -0.05, 0.33, 380, 0.5};
    xover::CohortBuildTrace trace;
    xover::rng::Stream stream(xover::rng::derive_seed(kTraceSeed, scenario++));
    xover::build_resampled_cohort(rc, baseline, stream, &trace);
    c.require(trace.calibrations.size() == 4,
              "expected 4 calibrations, got " +
                  std::to_string(trace.calibrations.size()));
    for (const auto& cal : trace.calibrations) {
      double dev = std::abs(sigmoid_mean(cal) - cal.target);
      worst_cal = std::max(worst_cal, dev);
      c.require(dev <= 1e-8, "calibration '" + cal.label + "' off target by " +
                                 fmt(dev));
    }
  }

  // (b) without carry-over, the crossover test dominates the first-period
  // test by a wide margin at n=380.
  auto run = [&](double lambda, std::size_t n) {
    xover::PowerStudyConfig pc;
    pc.dgp = xover::DgpKind::resample;
    pc.resample =
        xover::ResampleDgpConfig{cohort, theta, lambda, -0.05, 0.33, n, 0.5};
    pc.design = DesignParams{n, 0.5, 0.025, 0.0};
    pc.tests = {Method::cr, Method::pr};
    pc.replications = 1000;
    pc.seed = 0;
    return xover::run_power_study(pc);
  };
  auto rb = run(0.0, 380);
  double cr_b = tally_for(rb, Method::cr).power;
  double pr_b = tally_for(rb, Method::pr).power;
  c.require(cr_b - pr_b >= 0.15, "power_cr - power_pr = " + fmt(cr_b - pr_b) +
                                     " < 0.15 at lambda=0");

  // (c) with carry-over lambda = theta/2, at the first-period design's own
  // required size the ordering reverses.
  auto rc2 = run(theta / 2.0, 2780);
  double cr_c = tally_for(rc2, Method::cr).power;
  double pr_c = tally_for(rc2, Method::pr).power;
  c.require(pr_c > cr_c, "power_pr = " + fmt(pr_c) + " <= power_cr = " +
                             fmt(cr_c) + " at lambda=theta/2");

  c.note("worst calibration dev %.1e; cr %.3f vs pr %.3f; reversed %.3f vs %.3f",
         worst_cal, cr_b, pr_b, pr_c, cr_c);
}

// ---------------------------------------------------------------------------
// Criterion 10: byte-identical simulate output across re-runs and threads
// ---------------------------------------------------------------------------

void criterion10(Checker& c) {
  xover::cli::SimulateOptions g;
  g.ns = {120};
  g.lambdas = {0.05};
  g.thetas = {0.2};
  g.reps = 300;
  g.seed = 31415;
  g.threads = 1;
  auto g1 = xover::cli::cmd_simulate(g);
  auto g2 = xover::cli::cmd_simulate(g);
  c.require(g1.json == g2.json && g1.csv == g2.csv,
            "gaussian repeat run changed bytes");
  g.threads = 4;
  auto g4 = xover::cli::cmd_simulate(g);
  g.threads = 0;
  auto g0 = xover::cli::cmd_simulate(g);
  c.require(g4.json == g1.json && g4.csv == g1.csv,
            "gaussian bytes differ at 4 threads");
  c.require(g0.json == g1.json && g0.csv == g1.csv,
            "gaussian bytes differ at hardware thread count");

  xover::cli::SimulateOptions r;
  r.dgp = "resample";
  r.ns = {80};
  r.lambdas = {0.0};
  r.thetas = {0.1};
  r.reps = 80;
  r.seed = 2718;
  r.tests = {"cr", "pr"};
  r.threads = 1;
  auto r1 = xover::cli::cmd_simulate(r);
  r.threads = 3;
  auto r3 = xover::cli::cmd_simulate(r);
  c.require(r1.json == r3.json && r1.csv == r3.csv,
            "resample bytes differ across thread counts");
  c.note("gaussian x {repeat,4,auto} and resample x {1,3} threads identical");
}

// ---------------------------------------------------------------------------
// Criterion 11: tipping point location and decision flip
// ---------------------------------------------------------------------------

void criterion11(Checker& c) {
  xover::EstimateReport report;
  report.estimate = 0.3;
  report.asymptotic_variance = 3.0;
  report.n = 500;
  report.standard_error = std::sqrt(3.0 / 500.0);
  const DesignParams design{500, 0.5, 0.025, 0.0};

  double tip = xover::tipping_point(report, design);
  c.require(std::abs(tip - (-0.1482)) <= 1e-4,
            "tipping point " + fmt(tip) + " vs -0.1482 +- 1e-4");

  auto above = xover::sensitivity_test(report, design,
                                       xover::SensitivitySpec{tip + 1e-6});
  auto below = xover::sensitivity_test(report, design,
                                       xover::SensitivitySpec{tip - 1e-6});
  c.require(above.reject, "shift just above the tipping point fails to reject");
  c.require(!below.reject, "shift just below the tipping point still rejects");
  c.note("tip = %.6f, decisions flip across +-1e-6", tip);
}

}  // namespace

int main() {
  struct Row {
    int id;
    const char* label;
    void (*fn)(Checker&);
  };
  const Row rows[] = {
      {1, "closed-form variance truths and 100k-subject empirical moments",
       criterion1},
      {2, "analytic power spot values against the high-precision oracle",
       criterion2},
      {3, "Monte Carlo power matches analytic power on all 32 grid cells",
       criterion3},
      {4, "sample-size ratio identity and break-even carry-over thresholds",
       criterion4},
      {5, "Monte Carlo mean of the crossover estimator tracks its target",
       criterion5},
      {6, "adjusted variance never exceeds unadjusted on 1000 seeded trials",
       criterion6},
      {7, "correlated Bernoulli law: marginal, conditionals, bounds, sampling",
       criterion7},
      {8, "crossover estimator equals pooled variant under equal allocation",
       criterion8},
      {9, "resampling engine calibration targets and power orderings",
       criterion9},
      {10, "simulate output byte-identical across re-runs and thread counts",
       criterion10},
      {11, "tipping point location and decision flip across it", criterion11},
  };

  int failures = 0;
  for (const auto& row : rows) {
    Checker c;
    try {
      row.fn(c);
    } catch (const std::exception& e) {
      c.require(false, std::string("exception: ") + e.what());
    }
    if (c.ok()) {
      std::printf("[PASS] criterion %2d: %s (%s)\n", row.id, row.label,
                  c.notes().c_str());
    } else {
      ++failures;
      std::printf("[FAIL] criterion %2d: %s -- %s\n", row.id, row.label,
                  c.failure().c_str());
    }
    std::fflush(stdout);
  }
  if (failures == 0) {
    std::printf("acceptance: all 11 criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criteria failed\n", failures);
  return 1;
}
