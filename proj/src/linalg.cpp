#include "dikin/linalg.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "dikin/errors.hpp"

namespace dikin {

MetricState identity_metric(const Vector &point) {
  const auto d = point.size();
  MetricState m;
  m.point = point;
  m.hessian = Matrix::Zero(d, d);
  m.covariance = Matrix::Identity(d, d);
  m.chol_factor = Matrix::Identity(d, d);
  m.log_det_cov = 0.0;
  return m;
}

Matrix cholesky_spd(const Matrix &m) {
  const auto n = m.rows();
  if (m.cols() != n)
    throw DomainError("cholesky_spd: matrix is not square");
  Matrix l = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = m(j, j);
    for (Eigen::Index k = 0; k < j; ++k)
      pivot -= l(j, k) * l(j, k);
    if (!(pivot > 0.0))
      throw FactorizationFailure("cholesky_spd: non-positive pivot " +
                                 std::to_string(pivot) + " at column " +
                                 std::to_string(j));
    const double ljj = std::sqrt(pivot);
    l(j, j) = ljj;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double s = m(i, j);
      for (Eigen::Index k = 0; k < j; ++k)
        s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return l;
}

double standard_normal(Rng &rng) {
  // Box-Muller, cosine branch only: exactly two uniforms per normal keeps
  // streams aligned across kernels that draw different counts.
  const double u1 = rng.uniform();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Vector standard_normal_vector(Eigen::Index dim, Rng &rng) {
  Vector z(dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    z[i] = standard_normal(rng);
  return z;
}

Vector sample_gaussian(const GaussianProposalParams &params, const Vector &z) {
  const auto &l = params.metric.chol_factor;
  const Vector lz = l.triangularView<Eigen::Lower>() * z;
  return params.mean + std::sqrt(params.covariance_scale) * lz;
}

Vector sample_gaussian(const GaussianProposalParams &params, Rng &rng) {
  return sample_gaussian(params,
                         standard_normal_vector(params.mean.size(), rng));
}

double log_gaussian_density(const Vector &y,
                            const GaussianProposalParams &params) {
  const auto d = static_cast<double>(y.size());
  const Vector w = params.metric.chol_factor.triangularView<Eigen::Lower>()
                       .solve(y - params.mean);
  const double r = w.squaredNorm();
  return -0.5 * d * std::log(2.0 * std::numbers::pi) -
         0.5 * d * std::log(params.covariance_scale) -
         0.5 * params.metric.log_det_cov - r / (2.0 * params.covariance_scale);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw DomainError("inverse_normal_cdf: p must lie in (0, 1), got " +
                      std::to_string(p));

  // Acklam's rational approximation (relative error ~1e-9), then one Halley
  // step against erfc.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // e = Phi(x) - p, evaluated on the tail that carries the precision.
  const double e = x < 0.0
                       ? 0.5 * std::erfc(-x / std::numbers::sqrt2) - p
                       : (1.0 - p) - 0.5 * std::erfc(x / std::numbers::sqrt2);
  const double u =
      e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  x = x - u / (1.0 + 0.5 * x * u);
  return x;
}

} // namespace dikin
