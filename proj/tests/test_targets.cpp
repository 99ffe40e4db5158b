#include "doctest.h"

#include <cmath>
#include <numbers>

#include "dikin/special.hpp"
#include "dikin/targets.hpp"
#include "support.hpp"

using namespace dikin;
using namespace testing_support;

namespace {

// Composite Simpson with a fixed, fine grid; deliberately unrelated to the
// adaptive scheme under test.
template <class F> double simpson(F f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i)
    s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

double ball_norm_reference(int d) {
  const double num =
      simpson([d](double r) { return std::pow(r, d) * std::exp(-r * r / 2); },
              0.0, 1.0);
  const double den = simpson(
      [d](double r) { return std::pow(r, d - 1) * std::exp(-r * r / 2); }, 0.0,
      1.0);
  return num / den;
}

double box_norm_sq_reference(const Vector &b, const Vector &mu,
                             const Vector &sigma) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    auto w = [&](double x) {
      const double z = (x - mu[i]) / sigma[i];
      return std::exp(-0.5 * z * z);
    };
    const double z0 = simpson(w, -b[i], b[i], 200000);
    const double z2 = simpson([&](double x) { return x * x * w(x); }, -b[i],
                              b[i], 200000);
    total += z2 / z0;
  }
  return total;
}

} // namespace

TEST_CASE("logspace bounds and box parameters") {
  const Vector b = logspace_bounds(1.0, 0.01, 10);
  CHECK(b[0] == doctest::Approx(1.0));
  CHECK(b[9] == doctest::Approx(0.01));
  for (int i = 0; i < 10; ++i)
    CHECK(b[i] == doctest::Approx(std::pow(10.0, -2.0 * i / 9.0)));
  const auto p = box_gaussian_params(b);
  CHECK(p.mean[3] == doctest::Approx(b[3] / 2));
  CHECK(p.sigma[3] == doctest::Approx(std::pow(b[3], 1.5) / 2));
}

TEST_CASE("target gradients match finite differences") {
  Rng rng(31);
  const Vector b = logspace_bounds(1.0, 0.01, 10);
  const Target box = gaussian_box_target(b);
  const Target bim = bimodal_target(10, 0.5, 3.0);
  const Target std_g = standard_gaussian_target(10);
  for (const Target *t : {&box, &bim, &std_g}) {
    for (int n = 0; n < 20; ++n) {
      Vector x(10);
      for (int i = 0; i < 10; ++i)
        x[i] = rng.uniform(-b[i], b[i]);
      const double h = 1e-7;
      const Vector g_fd =
          fd_gradient([&](const Vector &y) { return t->potential(y); }, x, h);
      CHECK((t->gradient(x) - g_fd).norm() <=
            1e-5 * std::max(1.0, g_fd.norm()));
    }
  }
}

TEST_CASE("bimodal potential is symmetric and finite far from the modes") {
  const Target t = bimodal_target(4, 0.5, 3.0);
  const Vector x = (Vector(4) << 0.3, -0.1, 0.2, 0.9).finished();
  CHECK(t.potential(x) == doctest::Approx(t.potential(-x)));
  const Vector far = Vector::Constant(4, 40.0);
  CHECK(std::isfinite(t.potential(far)));
  CHECK(t.gradient(far).allFinite());
  // at a mode the gradient nearly vanishes
  CHECK(t.gradient(Vector::Constant(4, 0.5)).norm() < 1e-3);
}

TEST_CASE("tempering scales the log density") {
  const Target t = standard_gaussian_target(3);
  const Target hot = t.with_beta(2.0);
  const Vector x = Vector::Constant(3, 0.4);
  CHECK(hot.log_density(x) == doctest::Approx(t.log_density(x) / 2.0));
  CHECK(hot.potential(x) == t.potential(x));
  CHECK((hot.tempered_gradient(x) - t.gradient(x) / 2.0).norm() < 1e-15);
}

TEST_CASE("incomplete gamma functions") {
  // P(1, x) = 1 - e^-x,  P(1/2, x) = erf(sqrt x)
  for (double x : {0.1, 0.5, 1.0, 3.0, 10.0}) {
    CHECK(regularized_gamma_p(1.0, x) ==
          doctest::Approx(-std::expm1(-x)).epsilon(1e-13));
    CHECK(regularized_gamma_p(0.5, x) ==
          doctest::Approx(std::erf(std::sqrt(x))).epsilon(1e-13));
    CHECK(regularized_gamma_p(3.5, x) + regularized_gamma_q(3.5, x) ==
          doctest::Approx(1.0).epsilon(1e-14));
  }
  // P(2, x) = 1 - (1 + x) e^-x
  CHECK(regularized_gamma_q(2.0, 4.0) ==
        doctest::Approx(5.0 * std::exp(-4.0)).epsilon(1e-13));
}

TEST_CASE("adaptive quadrature") {
  CHECK(integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi) ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(integrate([](double x) { return std::exp(-x * x); }, -10.0, 10.0) ==
        doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-12));
  // narrow peak away from the midpoint
  CHECK(integrate([](double x) { return std::exp(-1e4 * (x - 0.73) * (x - 0.73)); },
                  0.0, 1.0) ==
        doctest::Approx(std::sqrt(std::numbers::pi) / 100.0).epsilon(1e-9));
}

TEST_CASE("truncated Gaussian E|x| on the unit ball") {
  // d = 1 closed form: (1 - e^-1/2) / (sqrt(pi/2) erf(1/sqrt 2))
  const double d1 = (1.0 - std::exp(-0.5)) /
                    (std::sqrt(std::numbers::pi / 2.0) *
                     std::erf(1.0 / std::numbers::sqrt2));
  CHECK(truncated_gaussian_ball_norm_expectation(1).value ==
        doctest::Approx(d1).epsilon(1e-10));

  for (int d : {1, 2, 5, 10, 20, 50}) {
    const double q = truncated_gaussian_ball_norm_expectation(d).value;
    const double g = truncated_gaussian_ball_norm_expectation_gamma(d).value;
    CHECK(rel_err(q, g) <= 1e-6);
    CHECK(rel_err(q, ball_norm_reference(d)) <= 1e-9);
  }
  CHECK(truncated_gaussian_ball_norm_expectation(5).value ==
        doctest::Approx(0.817768985692244).epsilon(1e-9));
  CHECK(truncated_gaussian_ball_norm_expectation(20).value ==
        doctest::Approx(0.9504352072378267).epsilon(1e-9));
}

TEST_CASE("truncated box Gaussian E|x|^2") {
  const Vector b = logspace_bounds(1.0, 0.01, 10);
  const auto p = box_gaussian_params(b);
  const double q = box_gaussian_norm_sq_expectation(p.bounds, p.mean, p.sigma).value;
  const double c =
      box_gaussian_norm_sq_expectation_closed_form(p.bounds, p.mean, p.sigma)
          .value;
  CHECK(rel_err(q, c) <= 1e-6);
  CHECK(rel_err(q, box_norm_sq_reference(p.bounds, p.mean, p.sigma)) <= 1e-8);
  CHECK(q == doctest::Approx(0.44467090992739794).epsilon(1e-9));
  CHECK(std::abs(q - 0.44) <= 0.01);
}

TEST_CASE("box E|x|^2 for wide and narrow truncations") {
  // Untruncated limit: mu^2 + sigma^2; extreme truncation: near uniform.
  Vector b(2), mu(2), sigma(2);
  b << 100.0, 1.0;
  mu << 0.3, 0.0;
  sigma << 1.0, 1e3;
  const double q = box_gaussian_norm_sq_expectation(b, mu, sigma).value;
  const double c = box_gaussian_norm_sq_expectation_closed_form(b, mu, sigma).value;
  CHECK(q == doctest::Approx(0.09 + 1.0 + 1.0 / 3.0).epsilon(1e-6));
  CHECK(rel_err(q, c) <= 1e-6);
}
