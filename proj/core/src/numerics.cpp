#include "xover/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "xover/errors.hpp"

namespace xover::numerics {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInvSqrt2Pi = 0.3989422804014327;

void require_finite(double x, const char* name) {
  if (!std::isfinite(x))
    throw InvalidInput(std::string(name) + " must be finite");
}

}  // namespace

double normal_cdf(double z) {
  require_finite(z, "z");
  // erfc keeps full relative accuracy in the lower tail, where the naive
  // 0.5*(1+erf(.)) form cancels.
  return 0.5 * std::erfc(-z / kSqrt2);
}

double normal_pdf(double z) {
  require_finite(z, "z");
  return kInvSqrt2Pi * std::exp(-0.5 * z * z);
}

double normal_quantile_fast(double p) {
  if (!(p > 0.0) || !(p < 1.0))
    throw InvalidInput("normal_quantile requires p in (0,1)");

  // Rational approximation in three regimes (central, two tails).
  static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double plow = 0.02425;

  if (p < plow) {
    double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
            c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - plow) {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
             c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  double q = p - 0.5;
  double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
         q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

double normal_quantile(double p) {
  double x = normal_quantile_fast(p);
  // Two Halley steps against the high-accuracy CDF pin the result to the
  // precision of normal_cdf itself.
  for (int i = 0; i < 2; ++i) {
    double e = normal_cdf(x) - p;
    double u = e / normal_pdf(x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

double expit(double eta) {
  if (eta >= 0.0) {
    return 1.0 / (1.0 + std::exp(-eta));
  }
  double t = std::exp(eta);
  return t / (1.0 + t);
}

double mean(const std::vector<double>& v) {
  if (v.empty()) throw InvalidInput("mean of empty vector");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_variance(const std::vector<double>& v) {
  if (v.size() < 2) throw InvalidInput("sample variance needs n >= 2");
  double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

std::vector<double> least_squares(const Matrix& design,
                                  const std::vector<double>& response) {
  const std::size_t m = design.rows();
  const std::size_t k = design.cols();
  if (k == 0) throw SingularCovariance("least_squares: empty design matrix");
  if (m < k)
    throw SingularCovariance("least_squares: fewer rows than columns");
  if (response.size() != m)
    throw InvalidInput("least_squares: response length mismatch");

  Matrix a = design;           // reduced in place to R
  std::vector<double> y = response;  // carries Q^T * response

  for (std::size_t j = 0; j < k; ++j) {
    // Householder reflector for column j below the diagonal.
    double norm = 0.0;
    for (std::size_t i = j; i < m; ++i) norm += a(i, j) * a(i, j);
    norm = std::sqrt(norm);
    if (norm == 0.0)
      throw SingularCovariance("least_squares: rank-deficient design");

    double alpha = (a(j, j) > 0.0) ? -norm : norm;
    std::vector<double> v(m - j);
    v[0] = a(j, j) - alpha;
    for (std::size_t i = j + 1; i < m; ++i) v[i - j] = a(i, j);
    double vnorm2 = 0.0;
    for (double t : v) vnorm2 += t * t;

    a(j, j) = alpha;
    for (std::size_t i = j + 1; i < m; ++i) a(i, j) = 0.0;

    if (vnorm2 > 0.0) {
      for (std::size_t c = j + 1; c < k; ++c) {
        double dot = 0.0;
        for (std::size_t i = j; i < m; ++i) dot += v[i - j] * a(i, c);
        double f = 2.0 * dot / vnorm2;
        for (std::size_t i = j; i < m; ++i) a(i, c) -= f * v[i - j];
      }
      double dot = 0.0;
      for (std::size_t i = j; i < m; ++i) dot += v[i - j] * y[i];
      double f = 2.0 * dot / vnorm2;
      for (std::size_t i = j; i < m; ++i) y[i] -= f * v[i - j];
    }
  }

  double dmax = 0.0, dmin = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < k; ++j) {
    double d = std::fabs(a(j, j));
    dmax = std::max(dmax, d);
    dmin = std::min(dmin, d);
  }
  if (!(dmin > 0.0) || dmax / dmin > 1e12)
    throw SingularCovariance("least_squares: design numerically singular");

  std::vector<double> beta(k, 0.0);
  for (std::size_t jj = k; jj-- > 0;) {
    double s = y[jj];
    for (std::size_t c = jj + 1; c < k; ++c) s -= a(jj, c) * beta[c];
    beta[jj] = s / a(jj, jj);
  }
  return beta;
}

LogisticModel logistic_fit(const Matrix& covariates,
                           const std::vector<int>& outcomes,
                           SolveReport* report,
                           SeparationPolicy on_separation) {
  const std::size_t n = covariates.rows() > 0 ? covariates.rows()
                                              : outcomes.size();
  const std::size_t d = covariates.cols();
  if (outcomes.size() != n || n == 0)
    throw InvalidInput("logistic_fit: outcome length mismatch");
  if (covariates.rows() > 0 && covariates.rows() != n)
    throw InvalidInput("logistic_fit: covariate row mismatch");

  std::size_t ones = 0;
  for (int y : outcomes) {
    if (y != 0 && y != 1) throw InvalidInput("logistic_fit: outcomes must be 0/1");
    ones += static_cast<std::size_t>(y);
  }
  if (ones == 0 || ones == n)
    throw InvalidInput("logistic_fit: outcomes are all identical");

  // Design with a leading intercept column.
  Matrix x(n, d + 1);
  for (std::size_t i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    for (std::size_t j = 0; j < d; ++j) x(i, j + 1) = covariates(i, j);
  }

  std::vector<double> beta(d + 1, 0.0);
  double pbar = static_cast<double>(ones) / static_cast<double>(n);
  beta[0] = std::log(pbar / (1.0 - pbar));

  constexpr std::size_t kMaxIter = 100;
  constexpr double kGradTol = 1e-8;
  constexpr double kSepTol = 1e-10;

  std::vector<double> eta(n), p(n);
  double gnorm = std::numeric_limits<double>::infinity();

  for (std::size_t iter = 1; iter <= kMaxIter; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      double e = beta[0];
      for (std::size_t j = 0; j < d; ++j) e += beta[j + 1] * x(i, j + 1);
      eta[i] = e;
      p[i] = expit(e);
    }

    gnorm = 0.0;
    for (std::size_t j = 0; j <= d; ++j) {
      double g = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        g += x(i, j) * (static_cast<double>(outcomes[i]) - p[i]);
      gnorm += g * g;
    }
    gnorm = std::sqrt(gnorm);
    if (gnorm <= kGradTol) {
      if (report) *report = {true, iter - 1, gnorm};
      LogisticModel model;
      model.intercept = beta[0];
      model.slopes.assign(beta.begin() + 1, beta.end());
      return model;
    }

    bool separated = false;
    for (std::size_t i = 0; i < n; ++i)
      if (p[i] < kSepTol || p[i] > 1.0 - kSepTol) separated = true;
    if (separated) {
      if (on_separation == SeparationPolicy::raise_error)
        throw NonConvergence(
            "logistic_fit: fitted probabilities collapsed onto {0,1} "
            "(separation)");
      if (report) *report = {false, iter - 1, gnorm};
      LogisticModel model;
      model.intercept = beta[0];
      model.slopes.assign(beta.begin() + 1, beta.end());
      return model;
    }

    // One Newton step phrased as a weighted least-squares solve.
    Matrix wx(n, d + 1);
    std::vector<double> wz(n);
    for (std::size_t i = 0; i < n; ++i) {
      double w = std::max(p[i] * (1.0 - p[i]), 1e-10);
      double sw = std::sqrt(w);
      double z = eta[i] + (static_cast<double>(outcomes[i]) - p[i]) / w;
      for (std::size_t j = 0; j <= d; ++j) wx(i, j) = sw * x(i, j);
      wz[i] = sw * z;
    }
    beta = least_squares(wx, wz);
  }

  throw NonConvergence("logistic_fit: iteration cap reached, gradient norm " +
                       std::to_string(gnorm));
}

double calibrate_intercept(const std::vector<double>& slopes,
                           const Matrix& covariates, double target,
                           double bracket_lo, double bracket_hi,
                           SolveReport* report) {
  if (!(target > 0.0) || !(target < 1.0))
    throw TargetOutOfRange("calibrate_intercept: target must lie in (0,1)");
  if (covariates.rows() == 0)
    throw InvalidInput("calibrate_intercept: empty covariate matrix");
  if (slopes.size() != covariates.cols())
    throw InvalidInput("calibrate_intercept: slope dimension mismatch");
  if (!(bracket_lo < bracket_hi))
    throw InvalidInput("calibrate_intercept: invalid bracket");

  const std::size_t n = covariates.rows();
  std::vector<double> offset(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < slopes.size(); ++j)
      s += slopes[j] * covariates(i, j);
    offset[i] = s;
  }

  auto mean_response = [&](double a) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += expit(a + offset[i]);
    return s / static_cast<double>(n);
  };

  double lo = bracket_lo, hi = bracket_hi;
  // Widen until the bracket straddles the root; the mean response is
  // monotone in the intercept so this always terminates for reachable
  // targets.
  constexpr double kLimit = 700.0;
  while (mean_response(lo) > target && lo > -kLimit)
    lo = std::max(-kLimit, lo - (hi - lo));
  while (mean_response(hi) < target && hi < kLimit)
    hi = std::min(kLimit, hi + (hi - lo));
  if (mean_response(lo) > target || mean_response(hi) < target)
    throw TargetOutOfRange("calibrate_intercept: target unreachable");

  constexpr std::size_t kMaxIter = 200;
  constexpr double kTol = 1e-12;
  double mid = 0.5 * (lo + hi);
  double g = 0.0;
  std::size_t iter = 0;
  for (; iter < kMaxIter; ++iter) {
    mid = 0.5 * (lo + hi);
    g = mean_response(mid) - target;
    if (std::fabs(g) <= kTol) break;
    if (g < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  if (report) *report = {std::fabs(g) <= kTol, iter, std::fabs(g)};
  return mid;
}

}  // namespace xover::numerics
