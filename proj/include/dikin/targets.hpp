#pragma once

#include <functional>
#include <string>

#include "dikin/linalg.hpp"

namespace dikin {

/// Potential f with gradient, tempered at beta: log rho_beta = -f / beta up
/// to a constant. Normalizing constants are never computed.
class Target {
public:
  using Potential = std::function<double(const Vector &)>;
  using Gradient = std::function<Vector(const Vector &)>;

  Target(std::string name, Eigen::Index dimension, Potential potential,
         Gradient gradient, double beta = 1.0);

  const std::string &name() const { return name_; }
  Eigen::Index dimension() const { return dim_; }
  double beta() const { return beta_; }

  /// Copy at another temperature.
  Target with_beta(double beta) const;

  double potential(const Vector &x) const { return potential_(x); }
  Vector gradient(const Vector &x) const { return gradient_(x); }

  double tempered_potential(const Vector &x) const {
    return potential_(x) / beta_;
  }
  Vector tempered_gradient(const Vector &x) const {
    return gradient_(x) / beta_;
  }

  /// Unnormalized log rho_beta.
  double log_density(const Vector &x) const { return -tempered_potential(x); }

private:
  std::string name_;
  Eigen::Index dim_;
  Potential potential_;
  Gradient gradient_;
  double beta_;
};

struct GroundTruth {
  std::string functional_name;
  double value = 0.0;
  std::string method;
};

/// Per-coordinate means and scales of the anisotropic box Gaussian.
struct BoxGaussianParams {
  Vector bounds;
  Vector mean;
  Vector sigma;
};

/// b_i = first * (last / first)^((i - 1) / (n - 1)), i = 1..n.
Vector logspace_bounds(double first, double last, Eigen::Index n);

/// mu_i = b_i / 2, sigma_i = b_i^(3/2) / 2.
BoxGaussianParams box_gaussian_params(const Vector &bounds);

/// f(x) = sum_i (x_i - mu_i)^2 / (2 sigma_i^2).
Target gaussian_box_target(const Vector &bounds);

/// f(x) = -log(exp(-k|x - c1|^2) + exp(-k|x + c1|^2)).
Target bimodal_target(Eigen::Index dimension, double offset = 0.5,
                      double stiffness = 3.0);

/// f(x) = |x|^2 / 2.
Target standard_gaussian_target(Eigen::Index dimension);

/// E|x| for the standard Gaussian truncated to the unit ball in R^d, by
/// quadrature of the radial integrals.
GroundTruth truncated_gaussian_ball_norm_expectation(int dimension);

/// Same quantity through the incomplete-gamma identity
/// sqrt(2) gamma((d+1)/2, 1/2) / gamma(d/2, 1/2).
GroundTruth truncated_gaussian_ball_norm_expectation_gamma(int dimension);

/// E|x|^2 for independent N(mu_i, sigma_i^2) truncated to [-b_i, b_i], by
/// quadrature of each coordinate's second moment.
GroundTruth box_gaussian_norm_sq_expectation(const Vector &bounds,
                                             const Vector &mean,
                                             const Vector &sigma);

/// Same quantity from the truncated-normal moment identities.
GroundTruth box_gaussian_norm_sq_expectation_closed_form(const Vector &bounds,
                                                         const Vector &mean,
                                                         const Vector &sigma);

} // namespace dikin
