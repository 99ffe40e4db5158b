#include "dikin/targets.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dikin/errors.hpp"
#include "dikin/special.hpp"

namespace dikin {

Target::Target(std::string name, Eigen::Index dimension, Potential potential,
               Gradient gradient, double beta)
    : name_(std::move(name)), dim_(dimension), potential_(std::move(potential)),
      gradient_(std::move(gradient)), beta_(beta) {
  if (dim_ < 1)
    throw DomainError("target dimension must be positive");
  if (!(beta_ > 0.0) || !std::isfinite(beta_))
    throw DomainError("temperature beta must be positive and finite");
}

Target Target::with_beta(double beta) const {
  return Target(name_, dim_, potential_, gradient_, beta);
}

Vector logspace_bounds(double first, double last, Eigen::Index n) {
  if (n < 1 || !(first > 0.0) || !(last > 0.0))
    throw DomainError("logspace_bounds needs n >= 1 and positive endpoints");
  Vector b(n);
  const double lf = std::log10(first);
  const double ll = std::log10(last);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
    b[i] = std::pow(10.0, lf + t * (ll - lf));
  }
  return b;
}

BoxGaussianParams box_gaussian_params(const Vector &bounds) {
  if (!(bounds.minCoeff() > 0.0))
    throw DomainError("box bounds must be positive");
  BoxGaussianParams p;
  p.bounds = bounds;
  p.mean = 0.5 * bounds;
  p.sigma = 0.5 * bounds.array().pow(1.5).matrix();
  return p;
}

Target gaussian_box_target(const Vector &bounds) {
  const auto params = box_gaussian_params(bounds);
  const Vector mean = params.mean;
  const Vector inv_var = params.sigma.array().square().inverse().matrix();
  auto f = [mean, inv_var](const Vector &x) {
    return 0.5 * ((x - mean).array().square() * inv_var.array()).sum();
  };
  auto g = [mean, inv_var](const Vector &x) -> Vector {
    return ((x - mean).array() * inv_var.array()).matrix();
  };
  return Target("gaussian_box", bounds.size(), f, g);
}

Target bimodal_target(Eigen::Index dimension, double offset, double stiffness) {
  const Vector c = Vector::Constant(dimension, offset);
  const double k = stiffness;
  // Log-sum-exp with max subtraction; exponents reach ~k d offset^2 * 4.
  auto weights = [c, k](const Vector &x, double &lse) {
    const double a = -k * (x - c).squaredNorm();
    const double b = -k * (x + c).squaredNorm();
    const double m = std::max(a, b);
    const double ea = std::exp(a - m);
    const double eb = std::exp(b - m);
    const double s = ea + eb;
    lse = m + std::log(s);
    return std::pair{ea / s, eb / s};
  };
  auto f = [weights](const Vector &x) {
    double lse;
    weights(x, lse);
    return -lse;
  };
  auto g = [weights, c, k](const Vector &x) -> Vector {
    double lse;
    const auto [wa, wb] = weights(x, lse);
    return 2.0 * k * (wa * (x - c) + wb * (x + c));
  };
  return Target("bimodal", dimension, f, g);
}

Target standard_gaussian_target(Eigen::Index dimension) {
  auto f = [](const Vector &x) { return 0.5 * x.squaredNorm(); };
  auto g = [](const Vector &x) -> Vector { return x; };
  return Target("standard_gaussian", dimension, f, g);
}

GroundTruth truncated_gaussian_ball_norm_expectation(int dimension) {
  if (dimension < 1)
    throw DomainError("dimension must be at least 1");
  const double d = dimension;
  const double num = integrate(
      [d](double r) { return std::pow(r, d) * std::exp(-0.5 * r * r); }, 0.0,
      1.0, 1e-15);
  const double den = integrate(
      [d](double r) { return std::pow(r, d - 1.0) * std::exp(-0.5 * r * r); },
      0.0, 1.0, 1e-15);
  return {"E_norm", num / den, "quadrature"};
}

GroundTruth truncated_gaussian_ball_norm_expectation_gamma(int dimension) {
  if (dimension < 1)
    throw DomainError("dimension must be at least 1");
  const double d = dimension;
  const double a1 = 0.5 * (d + 1.0);
  const double a0 = 0.5 * d;
  // gamma(s, x) = Gamma(s) P(s, x); the Gamma(s) ratio goes through lgamma.
  const double value = std::numbers::sqrt2 *
                       std::exp(std::lgamma(a1) - std::lgamma(a0)) *
                       regularized_gamma_p(a1, 0.5) /
                       regularized_gamma_p(a0, 0.5);
  return {"E_norm", value, "closed_form"};
}

namespace {

void check_box_args(const Vector &bounds, const Vector &mean,
                    const Vector &sigma) {
  if (bounds.size() != mean.size() || bounds.size() != sigma.size())
    throw DomainError("bounds, mean and sigma must have equal length");
  if (!(bounds.minCoeff() > 0.0) || !(sigma.minCoeff() > 0.0))
    throw DomainError("bounds and sigma must be positive");
}

double std_normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

// Phi(hi) - Phi(lo) without cancellation in either tail.
double normal_mass(double lo, double hi) {
  if (lo >= 0.0)
    return 0.5 * (std::erfc(lo / std::numbers::sqrt2) -
                  std::erfc(hi / std::numbers::sqrt2));
  if (hi <= 0.0)
    return 0.5 * (std::erfc(-hi / std::numbers::sqrt2) -
                  std::erfc(-lo / std::numbers::sqrt2));
  return 1.0 - 0.5 * std::erfc(-lo / std::numbers::sqrt2) -
         0.5 * std::erfc(hi / std::numbers::sqrt2);
}

} // namespace

GroundTruth box_gaussian_norm_sq_expectation(const Vector &bounds,
                                             const Vector &mean,
                                             const Vector &sigma) {
  check_box_args(bounds, mean, sigma);
  double total = 0.0;
  for (Eigen::Index i = 0; i < bounds.size(); ++i) {
    // Standardized coordinate z = (x - mu) / sigma on [lo, hi].
    const double mu = mean[i];
    const double s = sigma[i];
    // Normal mass beyond |z| = 40 is below 1e-300.
    const double lo = std::max((-bounds[i] - mu) / s, -40.0);
    const double hi = std::min((bounds[i] - mu) / s, 40.0);
    const double mass = integrate(std_normal_pdf, lo, hi, 1e-15);
    const double second = integrate(
        [mu, s](double z) {
          const double x = mu + s * z;
          return x * x * std_normal_pdf(z);
        },
        lo, hi, 1e-15 * (mu * mu + s * s));
    total += second / mass;
  }
  return {"E_norm_sq", total, "quadrature"};
}

GroundTruth box_gaussian_norm_sq_expectation_closed_form(const Vector &bounds,
                                                         const Vector &mean,
                                                         const Vector &sigma) {
  check_box_args(bounds, mean, sigma);
  double total = 0.0;
  for (Eigen::Index i = 0; i < bounds.size(); ++i) {
    const double mu = mean[i];
    const double s = sigma[i];
    const double lo = (-bounds[i] - mu) / s;
    const double hi = (bounds[i] - mu) / s;
    const double z = normal_mass(lo, hi);
    const double m1 = (std_normal_pdf(lo) - std_normal_pdf(hi)) / z;
    const double m2 = 1.0 + (lo * std_normal_pdf(lo) - hi * std_normal_pdf(hi)) / z;
    total += mu * mu + 2.0 * mu * s * m1 + s * s * m2;
  }
  return {"E_norm_sq", total, "closed_form"};
}

} // namespace dikin
