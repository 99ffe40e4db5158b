#pragma once

#include <memory>
#include <optional>
#include <string>

#include "dikin/linalg.hpp"

namespace dikin {

/// A bounded convex domain described by a self-concordant barrier J that is
/// finite exactly on the open interior.
///
/// value/gradient/hessian throw NotInterior for points that are not strictly
/// interior. The distance queries never throw.
class Barrier {
public:
  virtual ~Barrier() = default;

  virtual Eigen::Index dimension() const = 0;
  virtual std::string kind() const = 0;

  virtual double value(const Vector &x) const = 0;
  virtual Vector gradient(const Vector &x) const = 0;
  virtual Matrix hessian(const Vector &x) const = 0;

  /// Euclidean distance to the boundary, negative outside.
  virtual double signed_distance(const Vector &x) const = 0;

  /// Closed-form divergence of C_eps when available for this barrier and
  /// epsilon; nullopt otherwise.
  virtual std::optional<Vector> analytic_divergence(const Vector &x,
                                                    double epsilon) const {
    (void)x;
    (void)epsilon;
    return std::nullopt;
  }

  bool contains(const Vector &x) const { return signed_distance(x) > 0.0; }

  /// signed_distance clamped at zero.
  double distance_to_boundary(const Vector &x) const;
};

/// {x : a_i . x < 1, i = 1..K}. Boundedness is the caller's responsibility;
/// construction only checks the rows and a supplied interior point.
class PolytopeBarrier final : public Barrier {
public:
  PolytopeBarrier(Matrix constraint_rows, const Vector &interior_point);

  /// Axis-aligned box {|x_i| < b_i}: rows +-e_i / b_i.
  static PolytopeBarrier box(const Vector &bounds);

  Eigen::Index dimension() const override { return rows_.cols(); }
  Eigen::Index constraint_count() const { return rows_.rows(); }
  const Matrix &constraint_rows() const { return rows_; }
  std::string kind() const override { return "polytope"; }

  double value(const Vector &x) const override;
  Vector gradient(const Vector &x) const override;
  Matrix hessian(const Vector &x) const override;
  double signed_distance(const Vector &x) const override;

  /// 1 - a_i . x for every row.
  Vector slacks(const Vector &x) const;

private:
  Vector checked_slacks(const Vector &x) const;

  Matrix rows_;
  Vector row_norms_;
};

/// {x : |x| < r} with J(x) = -log(1 - |x|^2 / r^2).
class BallBarrier final : public Barrier {
public:
  BallBarrier(Eigen::Index dimension, double radius = 1.0);

  Eigen::Index dimension() const override { return dim_; }
  double radius() const { return radius_; }
  std::string kind() const override { return "ball"; }

  double value(const Vector &x) const override;
  Vector gradient(const Vector &x) const override;
  Matrix hessian(const Vector &x) const override;
  double signed_distance(const Vector &x) const override;

  /// Closed form for epsilon == 0.
  std::optional<Vector> analytic_divergence(const Vector &x,
                                            double epsilon) const override;

private:
  double checked_slack(const Vector &x) const;

  Eigen::Index dim_;
  double radius_;
};

/// H(x), C_eps(x) = (H + eps I)^-1 and its Cholesky factor at x.
MetricState metric_state(const Barrier &barrier, const Vector &x,
                         double epsilon);

enum class DivergenceMode { analytic, finite_difference, none };

std::string to_string(DivergenceMode mode);
DivergenceMode divergence_mode_from_string(const std::string &name);

/// Component i is sum_j dC_ij / dx_j.
///
/// finite_difference: central differences with step
/// min(1e-5, distance_to_boundary(x) / 4), C_eps recomputed at each probe.
/// analytic: the barrier's closed form; DomainError if it has none for this
/// epsilon. none: zero vector.
Vector divergence_of_covariance(const Barrier &barrier, const Vector &x,
                                double epsilon,
                                DivergenceMode mode =
                                    DivergenceMode::finite_difference);

} // namespace dikin
