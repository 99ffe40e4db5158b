#pragma once

#include <Eigen/Dense>

#include "dikin/rng.hpp"

namespace dikin {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Local metric at a point: barrier Hessian H, regularized covariance
/// C_eps = (H + eps I)^-1, its lower Cholesky factor and log-determinant.
/// Immutable after construction; built by `metric_state` in geometry.hpp or
/// `identity_metric` below.
struct MetricState {
  Vector point;
  Matrix hessian;
  Matrix covariance;
  Matrix chol_factor;
  double log_det_cov = 0.0;
};

/// Identity covariance at `point` (the metric MALA uses).
MetricState identity_metric(const Vector &point);

/// Lower-triangular L with L L^T = m. No pivoting; throws
/// FactorizationFailure when a pivot is not strictly positive.
Matrix cholesky_spd(const Matrix &m);

/// N(mean, covariance_scale * metric.covariance). The metric is borrowed.
struct GaussianProposalParams {
  Vector mean;
  double covariance_scale;
  const MetricState &metric;
};

double standard_normal(Rng &rng);

Vector standard_normal_vector(Eigen::Index dim, Rng &rng);

/// mean + sqrt(covariance_scale) * L * z with z drawn from `rng`.
Vector sample_gaussian(const GaussianProposalParams &params, Rng &rng);

/// Same map with a caller-supplied standard-normal vector.
Vector sample_gaussian(const GaussianProposalParams &params, const Vector &z);

/// Log density of the proposal at y, using the cached Cholesky factor.
double log_gaussian_density(const Vector &y,
                            const GaussianProposalParams &params);

/// Standard normal CDF.
double normal_cdf(double x);

/// Phi^-1(p). Throws DomainError unless 0 < p < 1.
double inverse_normal_cdf(double p);

} // namespace dikin
