#include "xover/estimators.hpp"

#include <cmath>
#include <cstddef>
#include <string>

#include "xover/errors.hpp"
#include "xover/numerics.hpp"

namespace xover {

namespace {

void require_two_per_arm(const TrialDataset& data) {
  data.validate();
  if (data.arm_count(1) < 2 || data.arm_count(0) < 2)
    throw EmptyArm("estimator requires at least 2 subjects in each arm");
}

EstimateReport make_report(double est, double avar, std::size_t n, Method m) {
  EstimateReport r;
  r.estimate = est;
  r.asymptotic_variance = avar;
  r.standard_error = std::sqrt(avar / static_cast<double>(n));
  r.n = n;
  r.method = m;
  r.degenerate_variance = (avar == 0.0 && n > 2);
  return r;
}

// Mean and unbiased variance of `values` restricted to subjects with
// arm == a, accumulated in subject order.
void arm_moments(const TrialDataset& data, const std::vector<double>& values,
                 int a, double* mean_out, double* var_out, std::size_t* n_out) {
  double s = 0.0;
  std::size_t c = 0;
  for (std::size_t i = 0; i < data.n(); ++i)
    if (data.arm[i] == a) {
      s += values[i];
      ++c;
    }
  double m = s / static_cast<double>(c);
  double q = 0.0;
  for (std::size_t i = 0; i < data.n(); ++i)
    if (data.arm[i] == a) q += (values[i] - m) * (values[i] - m);
  *mean_out = m;
  *var_out = q / static_cast<double>(c - 1);
  *n_out = c;
}

std::vector<double> column_means(const Matrix& x) {
  std::vector<double> m(x.cols(), 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) m[j] += x(i, j);
  for (double& v : m) v /= static_cast<double>(x.rows());
  return m;
}

double quad_form(const Matrix& s, const std::vector<double>& v) {
  double q = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) q += v[i] * s(i, j) * v[j];
  return q;
}

}  // namespace

DeltaView compute_deltas(const TrialDataset& data) {
  require_two_per_arm(data);
  DeltaView dv;
  dv.delta.resize(data.n());
  for (std::size_t i = 0; i < data.n(); ++i)
    dv.delta[i] = data.y1[i] - data.y2[i];
  arm_moments(data, dv.delta, 1, &dv.mean1, &dv.var1, &dv.n1);
  arm_moments(data, dv.delta, 0, &dv.mean0, &dv.var0, &dv.n0);
  return dv;
}

EstimateReport theta_cr(const TrialDataset& data) {
  DeltaView dv = compute_deltas(data);
  double est = 0.5 * (dv.mean1 - dv.mean0);
  double avar =
      dv.var1 / (4.0 * data.pi1) + dv.var0 / (4.0 * (1.0 - data.pi1));
  return make_report(est, avar, data.n(), Method::cr);
}

EstimateReport theta_cr_alt(const TrialDataset& data) {
  DeltaView dv = compute_deltas(data);
  std::vector<double> signed_delta(data.n());
  for (std::size_t i = 0; i < data.n(); ++i)
    signed_delta[i] = data.arm[i] == 1 ? dv.delta[i] : -dv.delta[i];
  // Under equal allocation the pooled mean coincides with the arm-mean
  // contrast; evaluate it that way so the two estimators agree to the last
  // bit.
  double est = dv.n1 == dv.n0 ? 0.5 * (dv.mean1 - dv.mean0)
                              : numerics::mean(signed_delta);
  double avar = numerics::sample_variance(signed_delta);
  return make_report(est, avar, data.n(), Method::cr_alt);
}

EstimateReport theta_pr(const TrialDataset& data) {
  require_two_per_arm(data);
  double m1, v1, m0, v0;
  std::size_t n1, n0;
  arm_moments(data, data.y1, 1, &m1, &v1, &n1);
  arm_moments(data, data.y1, 0, &m0, &v0, &n0);
  double est = m1 - m0;
  double avar = v1 / data.pi1 + v0 / (1.0 - data.pi1);
  return make_report(est, avar, data.n(), Method::pr);
}

AdjustmentFit fit_adjustment(const TrialDataset& data,
                             AdjustResponse response) {
  require_two_per_arm(data);
  const std::size_t n = data.n();
  const std::size_t d = data.covariates.cols();
  if (d == 0)
    throw SingularCovariance(
        "covariate adjustment requires at least one covariate column");

  std::vector<double> resp(n);
  for (std::size_t i = 0; i < n; ++i)
    resp[i] = response == AdjustResponse::delta ? data.y1[i] - data.y2[i]
                                                : data.y1[i];

  AdjustmentFit fit;
  fit.response = response;
  fit.xbar = column_means(data.covariates);

  for (int a : {1, 0}) {
    std::size_t na = data.arm_count(a);
    if (na <= d + 1)
      throw SingularCovariance(
          "covariate adjustment needs per-arm sample size > covariate "
          "dimension + 1 (arm " +
          std::to_string(a) + " has " + std::to_string(na) + " subjects)");

    // Centered within-arm design and response; the slope is then a plain
    // least-squares solve.
    std::vector<double> xbar_a(d, 0.0);
    double rbar = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (data.arm[i] == a) {
        for (std::size_t j = 0; j < d; ++j) xbar_a[j] += data.covariates(i, j);
        rbar += resp[i];
      }
    for (double& v : xbar_a) v /= static_cast<double>(na);
    rbar /= static_cast<double>(na);

    Matrix xc(na, d);
    std::vector<double> rc(na);
    std::size_t r = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (data.arm[i] == a) {
        for (std::size_t j = 0; j < d; ++j)
          xc(r, j) = data.covariates(i, j) - xbar_a[j];
        rc[r] = resp[i] - rbar;
        ++r;
      }
    std::vector<double> beta = numerics::least_squares(xc, rc);

    // Unbiased variance of the adjusted response resp - beta . x within the
    // arm (same n-1 divisor as the unadjusted moments).
    double q = 0.0;
    r = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (data.arm[i] == a) {
        double e = rc[r];
        for (std::size_t j = 0; j < d; ++j) e -= beta[j] * xc(r, j);
        q += e * e;
        ++r;
      }
    double rv = q / static_cast<double>(na - 1);

    if (a == 1) {
      fit.beta1 = std::move(beta);
      fit.resid_var1 = rv;
      fit.xbar1 = std::move(xbar_a);
    } else {
      fit.beta0 = std::move(beta);
      fit.resid_var0 = rv;
      fit.xbar0 = std::move(xbar_a);
    }
  }

  fit.sigma_x = Matrix(d, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t k = 0; k < d; ++k)
        fit.sigma_x(j, k) += (data.covariates(i, j) - fit.xbar[j]) *
                             (data.covariates(i, k) - fit.xbar[k]);
  for (double& v : fit.sigma_x.data()) v /= static_cast<double>(n - 1);

  return fit;
}

EstimateReport theta_cr_adj(const TrialDataset& data) {
  AdjustmentFit fit = fit_adjustment(data, AdjustResponse::delta);
  DeltaView dv = compute_deltas(data);

  double adj1 = dv.mean1, adj0 = dv.mean0;
  for (std::size_t j = 0; j < fit.xbar.size(); ++j) {
    adj1 -= fit.beta1[j] * (fit.xbar1[j] - fit.xbar[j]);
    adj0 -= fit.beta0[j] * (fit.xbar0[j] - fit.xbar[j]);
  }
  double est = 0.5 * (adj1 - adj0);

  std::vector<double> bdiff(fit.beta1.size());
  for (std::size_t j = 0; j < bdiff.size(); ++j)
    bdiff[j] = fit.beta1[j] - fit.beta0[j];
  double avar = fit.resid_var1 / (4.0 * data.pi1) +
                fit.resid_var0 / (4.0 * (1.0 - data.pi1)) +
                0.25 * quad_form(fit.sigma_x, bdiff);
  return make_report(est, avar, data.n(), Method::cr_adj);
}

EstimateReport theta_pr_adj(const TrialDataset& data) {
  AdjustmentFit fit = fit_adjustment(data, AdjustResponse::y1);

  double m1, v1, m0, v0;
  std::size_t n1, n0;
  arm_moments(data, data.y1, 1, &m1, &v1, &n1);
  arm_moments(data, data.y1, 0, &m0, &v0, &n0);

  double adj1 = m1, adj0 = m0;
  for (std::size_t j = 0; j < fit.xbar.size(); ++j) {
    adj1 -= fit.beta1[j] * (fit.xbar1[j] - fit.xbar[j]);
    adj0 -= fit.beta0[j] * (fit.xbar0[j] - fit.xbar[j]);
  }
  double est = adj1 - adj0;

  std::vector<double> bdiff(fit.beta1.size());
  for (std::size_t j = 0; j < bdiff.size(); ++j)
    bdiff[j] = fit.beta1[j] - fit.beta0[j];
  double avar = fit.resid_var1 / data.pi1 + fit.resid_var0 / (1.0 - data.pi1) +
                quad_form(fit.sigma_x, bdiff);
  return make_report(est, avar, data.n(), Method::pr_adj);
}

EstimateReport estimate(const TrialDataset& data, Method method) {
  switch (method) {
    case Method::cr:
      return theta_cr(data);
    case Method::cr_alt:
      return theta_cr_alt(data);
    case Method::pr:
      return theta_pr(data);
    case Method::cr_adj:
      return theta_cr_adj(data);
    case Method::pr_adj:
      return theta_pr_adj(data);
  }
  throw InvalidInput("unknown estimation method");
}

}  // namespace xover
