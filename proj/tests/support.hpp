#pragma once

#include <cmath>
#include <filesystem>
#include <functional>
#include <string>

#include "dikin/errors.hpp"
#include "dikin/geometry.hpp"
#include "dikin/rng.hpp"
#include "dikin/targets.hpp"

namespace testing_support {

using dikin::Matrix;
using dikin::Vector;

// Zero barrier on a large box: its Hessian vanishes, so with epsilon = 1 the
// Dikin covariance is exactly the identity.
class FlatBarrier final : public dikin::Barrier {
public:
  FlatBarrier(Eigen::Index d, double half_width)
      : dim_(d), half_width_(half_width) {}

  Eigen::Index dimension() const override { return dim_; }
  std::string kind() const override { return "flat"; }
  double value(const Vector &) const override { return 0.0; }
  Vector gradient(const Vector &) const override { return Vector::Zero(dim_); }
  Matrix hessian(const Vector &) const override {
    return Matrix::Zero(dim_, dim_);
  }
  double signed_distance(const Vector &x) const override {
    return half_width_ - x.cwiseAbs().maxCoeff();
  }

private:
  Eigen::Index dim_;
  double half_width_;
};

inline dikin::Target flat_target(Eigen::Index d) {
  return dikin::Target(
      "flat", d, [](const Vector &) { return 0.0; },
      [d](const Vector &) { return Vector(Vector::Zero(d)); });
}

inline Vector fd_gradient(const std::function<double(const Vector &)> &f,
                          const Vector &x, double h) {
  Vector g(x.size());
  Vector p = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    p[i] = x[i] + h;
    const double fp = f(p);
    p[i] = x[i] - h;
    const double fm = f(p);
    p[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

inline Matrix fd_jacobian(const std::function<Vector(const Vector &)> &g,
                          const Vector &x, double h) {
  Matrix j(x.size(), x.size());
  Vector p = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    p[i] = x[i] + h;
    const Vector gp = g(p);
    p[i] = x[i] - h;
    const Vector gm = g(p);
    p[i] = x[i];
    j.col(i) = (gp - gm) / (2.0 * h);
  }
  return j;
}

// Rejection sampler for interior points that keep at least `margin` from the
// boundary, drawn from a cube of half-width `extent`.
inline Vector random_interior_point(const dikin::Barrier &b, double extent,
                                    double margin, dikin::Rng &rng) {
  for (;;) {
    Vector x(b.dimension());
    for (Eigen::Index i = 0; i < x.size(); ++i)
      x[i] = rng.uniform(-extent, extent);
    if (b.signed_distance(x) > margin)
      return x;
  }
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

inline std::filesystem::path fresh_dir(const std::string &name) {
  auto p = std::filesystem::temp_directory_path() / ("dikin_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

} // namespace testing_support
