#include "dikin/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "dikin/errors.hpp"

namespace dikin {

double Barrier::distance_to_boundary(const Vector &x) const {
  return std::max(0.0, signed_distance(x));
}

// ---------------------------------------------------------------------------
// Polytope

PolytopeBarrier::PolytopeBarrier(Matrix constraint_rows,
                                 const Vector &interior_point)
    : rows_(std::move(constraint_rows)) {
  if (rows_.rows() == 0 || rows_.cols() == 0)
    throw DomainError("polytope needs at least one constraint and dimension");
  if (!rows_.allFinite())
    throw DomainError("polytope constraint rows must be finite");
  row_norms_ = rows_.rowwise().norm();
  for (Eigen::Index i = 0; i < rows_.rows(); ++i)
    if (!(row_norms_[i] > 0.0))
      throw DomainError("polytope constraint row " + std::to_string(i) +
                        " is zero");
  if (interior_point.size() != rows_.cols())
    throw DomainError("interior point has wrong dimension");
  if (!contains(interior_point))
    throw NotInterior("supplied interior point is not strictly feasible");
}

PolytopeBarrier PolytopeBarrier::box(const Vector &bounds) {
  const auto d = bounds.size();
  Matrix rows = Matrix::Zero(2 * d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    if (!(bounds[i] > 0.0) || !std::isfinite(bounds[i]))
      throw DomainError("box bounds must be positive and finite");
    rows(2 * i, i) = 1.0 / bounds[i];
    rows(2 * i + 1, i) = -1.0 / bounds[i];
  }
  return PolytopeBarrier(std::move(rows), Vector::Zero(d));
}

Vector PolytopeBarrier::slacks(const Vector &x) const {
  return Vector::Ones(rows_.rows()) - rows_ * x;
}

Vector PolytopeBarrier::checked_slacks(const Vector &x) const {
  if (x.size() != rows_.cols())
    throw DomainError("point has wrong dimension");
  Vector s = slacks(x);
  if (!(s.minCoeff() > 0.0) || !s.allFinite())
    throw NotInterior("point is not strictly inside the polytope");
  return s;
}

double PolytopeBarrier::value(const Vector &x) const {
  const Vector s = checked_slacks(x);
  return -s.array().log().sum();
}

Vector PolytopeBarrier::gradient(const Vector &x) const {
  const Vector s = checked_slacks(x);
  return rows_.transpose() * s.cwiseInverse();
}

Matrix PolytopeBarrier::hessian(const Vector &x) const {
  const Vector s = checked_slacks(x);
  const Matrix scaled = s.cwiseInverse().asDiagonal() * rows_;
  const Matrix h = scaled.transpose() * scaled;
  // GEMM blocking leaves the product asymmetric in the last bits.
  return 0.5 * (h + h.transpose());
}

double PolytopeBarrier::signed_distance(const Vector &x) const {
  if (x.size() != rows_.cols() || !x.allFinite())
    return -1.0;
  return (slacks(x).array() / row_norms_.array()).minCoeff();
}

// ---------------------------------------------------------------------------
// Ball

BallBarrier::BallBarrier(Eigen::Index dimension, double radius)
    : dim_(dimension), radius_(radius) {
  if (dim_ < 1)
    throw DomainError("ball dimension must be positive");
  if (!(radius_ > 0.0) || !std::isfinite(radius_))
    throw DomainError("ball radius must be positive and finite");
}

double BallBarrier::checked_slack(const Vector &x) const {
  if (x.size() != dim_)
    throw DomainError("point has wrong dimension");
  const double s = 1.0 - x.squaredNorm() / (radius_ * radius_);
  if (!(s > 0.0))
    throw NotInterior("point is not strictly inside the ball");
  return s;
}

double BallBarrier::value(const Vector &x) const {
  return -std::log(checked_slack(x));
}

Vector BallBarrier::gradient(const Vector &x) const {
  const double s = checked_slack(x);
  return (2.0 / (radius_ * radius_ * s)) * x;
}

Matrix BallBarrier::hessian(const Vector &x) const {
  const double s = checked_slack(x);
  const double r2 = radius_ * radius_;
  const Vector u = (2.0 / (r2 * s)) * x;
  Matrix h = u * u.transpose();
  h.diagonal().array() += 2.0 / (r2 * s);
  return h;
}

double BallBarrier::signed_distance(const Vector &x) const {
  if (x.size() != dim_ || !x.allFinite())
    return -1.0;
  return radius_ - x.norm();
}

std::optional<Vector> BallBarrier::analytic_divergence(const Vector &x,
                                                       double epsilon) const {
  if (epsilon != 0.0)
    return std::nullopt;
  checked_slack(x);
  // On the unit ball C(u) = (1 - p)/2 I - (1 - p)/(1 + p) u u^T with
  // p = |u|^2, whose divergence is
  //   u [-1 + 4p/(1 + p)^2 - (d + 1)(1 - p)/(1 + p)].
  // For radius r, C_r(x) = r^2 C(x/r), so div C_r(x) = r div C(x/r).
  const Vector u = x / radius_;
  const double p = u.squaredNorm();
  const double d = static_cast<double>(dim_);
  const double coeff = -1.0 + 4.0 * p / ((1.0 + p) * (1.0 + p)) -
                       (d + 1.0) * (1.0 - p) / (1.0 + p);
  return Vector(radius_ * coeff * u);
}

// ---------------------------------------------------------------------------
// Metric

namespace {

Matrix regularized_covariance(const Barrier &barrier, const Vector &x,
                              double epsilon, Matrix *hessian_out) {
  Matrix h = barrier.hessian(x);
  Matrix precision = h;
  precision.diagonal().array() += epsilon;
  const Matrix r = cholesky_spd(precision);
  const auto d = x.size();
  const Matrix r_inv =
      r.triangularView<Eigen::Lower>().solve(Matrix::Identity(d, d));
  Matrix c = r_inv.transpose() * r_inv;
  c = 0.5 * (c + c.transpose()).eval();
  if (hessian_out)
    *hessian_out = std::move(h);
  return c;
}

} // namespace

MetricState metric_state(const Barrier &barrier, const Vector &x,
                         double epsilon) {
  if (!(epsilon >= 0.0))
    throw DomainError("metric_state: epsilon must be non-negative");
  MetricState m;
  m.point = x;
  m.covariance = regularized_covariance(barrier, x, epsilon, &m.hessian);
  m.chol_factor = cholesky_spd(m.covariance);
  m.log_det_cov = 2.0 * m.chol_factor.diagonal().array().log().sum();
  return m;
}

std::string to_string(DivergenceMode mode) {
  switch (mode) {
  case DivergenceMode::analytic:
    return "analytic";
  case DivergenceMode::finite_difference:
    return "finite_difference";
  case DivergenceMode::none:
    return "none";
  }
  return "unknown";
}

DivergenceMode divergence_mode_from_string(const std::string &name) {
  if (name == "analytic")
    return DivergenceMode::analytic;
  if (name == "finite_difference" || name == "fd")
    return DivergenceMode::finite_difference;
  if (name == "none")
    return DivergenceMode::none;
  throw DomainError("unknown divergence mode '" + name + "'");
}

Vector divergence_of_covariance(const Barrier &barrier, const Vector &x,
                                double epsilon, DivergenceMode mode) {
  const double dist = barrier.signed_distance(x);
  if (!(dist > 0.0))
    throw NotInterior("divergence_of_covariance: point is not interior");
  const auto d = x.size();

  switch (mode) {
  case DivergenceMode::none:
    return Vector::Zero(d);
  case DivergenceMode::analytic: {
    auto div = barrier.analytic_divergence(x, epsilon);
    if (!div)
      throw DomainError("no analytic divergence for " + barrier.kind() +
                        " barrier with epsilon = " + std::to_string(epsilon));
    return *div;
  }
  case DivergenceMode::finite_difference:
    break;
  }

  // Probes stay within a quarter of the boundary distance.
  const double step = std::min(1e-5, dist / 4.0);
  Vector div = Vector::Zero(d);
  Vector probe = x;
  for (Eigen::Index j = 0; j < d; ++j) {
    probe[j] = x[j] + step;
    const Matrix c_plus = regularized_covariance(barrier, probe, epsilon, nullptr);
    probe[j] = x[j] - step;
    const Matrix c_minus =
        regularized_covariance(barrier, probe, epsilon, nullptr);
    probe[j] = x[j];
    div += (c_plus.col(j) - c_minus.col(j)) / (2.0 * step);
  }
  return div;
}

} // namespace dikin
