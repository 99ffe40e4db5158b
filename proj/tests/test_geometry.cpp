#include "doctest.h"

#include <cmath>
#include <vector>

#include "dikin/errors.hpp"
#include "dikin/geometry.hpp"
#include "support.hpp"

using namespace dikin;
using namespace testing_support;

namespace {

// Closed-form covariance of the unit-ball barrier with epsilon = 0 (rank-one
// inverse of H = 2/s I + 4 x x^T / s^2, s = 1 - |x|^2).
Matrix ball_covariance(const Vector &x) {
  const double p = x.squaredNorm();
  const auto d = x.size();
  return (1.0 - p) / 2.0 * Matrix::Identity(d, d) -
         (1.0 - p) / (1.0 + p) * x * x.transpose();
}

PolytopeBarrier triangle() {
  Matrix rows(3, 2);
  rows << -1.0, 0.0, 0.0, -1.0, 1.0, 1.0; // x > -1, y > -1, x + y < 1
  return PolytopeBarrier(rows, Vector::Zero(2));
}

PolytopeBarrier skew_polytope(Rng &rng, int d, int k) {
  Matrix rows(k, d);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < d; ++j)
      rows(i, j) = rng.uniform(-1.0, 1.0);
  return PolytopeBarrier(rows, Vector::Zero(d));
}

void check_derivatives(const Barrier &b, double extent, Rng &rng, int points) {
  for (int n = 0; n < points; ++n) {
    const Vector x = random_interior_point(b, extent, 0.05, rng);
    const Vector g = b.gradient(x);
    const Vector g_fd = fd_gradient([&](const Vector &y) { return b.value(y); },
                                    x, 1e-6);
    CHECK((g - g_fd).norm() <= 1e-6 * std::max(1.0, g.norm()));
    const Matrix h = b.hessian(x);
    const Matrix h_fd =
        fd_jacobian([&](const Vector &y) { return b.gradient(y); }, x, 1e-6);
    CHECK((h - h_fd).norm() <= 1e-5 * std::max(1.0, h.norm()));
    CHECK((h - h.transpose()).norm() == 0.0);
  }
}

} // namespace

TEST_CASE("polytope construction checks its inputs") {
  Matrix rows(2, 2);
  rows << 1.0, 0.0, 0.0, 0.0;
  CHECK_THROWS_AS(PolytopeBarrier(rows, Vector::Zero(2)), DomainError);
  rows << 1.0, 0.0, 0.0, std::nan("");
  CHECK_THROWS_AS(PolytopeBarrier(rows, Vector::Zero(2)), DomainError);
  rows << 1.0, 0.0, 0.0, 1.0;
  CHECK_THROWS_AS(PolytopeBarrier(rows, Vector::Constant(2, 2.0)), NotInterior);
  CHECK_THROWS_AS(PolytopeBarrier(rows, Vector::Zero(3)), DomainError);
  CHECK_THROWS_AS(PolytopeBarrier::box(Vector::Constant(2, -1.0)), DomainError);
}

TEST_CASE("barrier evaluation outside the domain throws NotInterior") {
  const auto box = PolytopeBarrier::box(Vector::Ones(2));
  const Vector out = Vector::Constant(2, 1.5);
  CHECK_THROWS_AS(box.value(out), NotInterior);
  CHECK_THROWS_AS(box.gradient(out), NotInterior);
  CHECK_THROWS_AS(box.hessian(out), NotInterior);
  CHECK_THROWS_AS(box.hessian(Vector::Ones(2)), NotInterior); // on the face
  const BallBarrier ball(3);
  CHECK_THROWS_AS(ball.value(Vector::Ones(3)), NotInterior);
  CHECK_THROWS_AS(metric_state(ball, Vector::Ones(3), 0.0), NotInterior);
}

TEST_CASE("signed distances") {
  const auto box = PolytopeBarrier::box((Vector(2) << 2.0, 0.5).finished());
  CHECK(box.signed_distance(Vector::Zero(2)) == doctest::Approx(0.5));
  CHECK(box.signed_distance((Vector(2) << 1.5, 0.0).finished()) ==
        doctest::Approx(0.5));
  CHECK(box.signed_distance((Vector(2) << 0.0, 0.7).finished()) ==
        doctest::Approx(-0.2));
  CHECK(box.distance_to_boundary((Vector(2) << 0.0, 0.7).finished()) == 0.0);

  const auto tri = triangle();
  // distance to x + y = 1 from the origin is 1/sqrt(2)
  CHECK(tri.signed_distance(Vector::Zero(2)) ==
        doctest::Approx(1.0 / std::sqrt(2.0)));

  const BallBarrier ball(4, 2.0);
  CHECK(ball.signed_distance(Vector::Zero(4)) == doctest::Approx(2.0));
  CHECK(ball.signed_distance(Vector::Constant(4, 1.5)) == doctest::Approx(-1.0));
  CHECK_FALSE(ball.contains(Vector::Constant(4, 1.0)));
}

TEST_CASE("barrier gradients and Hessians match finite differences") {
  Rng rng(101);
  SUBCASE("box") {
    const auto b = PolytopeBarrier::box(logspace_bounds(1.0, 0.1, 4));
    check_derivatives(b, 1.0, rng, 30);
  }
  SUBCASE("skew polytope") {
    const auto b = skew_polytope(rng, 3, 9);
    check_derivatives(b, 3.0, rng, 30);
  }
  SUBCASE("ball") {
    const BallBarrier b(5, 1.7);
    check_derivatives(b, 1.7, rng, 30);
  }
}

TEST_CASE("box covariance at the origin is diagonal (2/b^2 + eps)^-1") {
  const Vector b = logspace_bounds(1.0, 0.01, 10);
  const auto box = PolytopeBarrier::box(b);
  const MetricState m = metric_state(box, Vector::Zero(10), 1e-5);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) {
      const double expected = i == j ? 1.0 / (2.0 / (b[i] * b[i]) + 1e-5) : 0.0;
      CHECK(m.covariance(i, j) ==
            doctest::Approx(expected).epsilon(1e-12).scale(1e-20));
    }
  CHECK(m.log_det_cov ==
        doctest::Approx(std::log(m.covariance.determinant())).epsilon(1e-12));
}

TEST_CASE("ball covariance matches the rank-one closed form") {
  Rng rng(7);
  const BallBarrier ball(6);
  for (int n = 0; n < 20; ++n) {
    const Vector x = random_interior_point(ball, 1.0, 0.01, rng);
    const MetricState m = metric_state(ball, x, 0.0);
    CHECK((m.covariance - ball_covariance(x)).norm() <
          1e-12 * ball_covariance(x).norm());
    CHECK((m.chol_factor * m.chol_factor.transpose() - m.covariance).norm() <
          1e-13);
  }
}

TEST_CASE("covariance shrinks quadratically near a face") {
  const auto box = PolytopeBarrier::box(Vector::Ones(3));
  std::vector<double> lam;
  for (double s : {1e-2, 5e-3, 2.5e-3}) {
    Vector x = Vector::Zero(3);
    x[0] = 1.0 - s;
    const MetricState m = metric_state(box, x, 1e-5);
    Eigen::SelfAdjointEigenSolver<Matrix> es(m.covariance);
    lam.push_back(es.eigenvalues().minCoeff());
  }
  CHECK(lam[0] / lam[1] == doctest::Approx(4.0).epsilon(0.1));
  CHECK(lam[1] / lam[2] == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("analytic ball divergence agrees with finite differences") {
  Rng rng(17);
  for (double r : {1.0, 0.6}) {
    const BallBarrier ball(5, r);
    for (int n = 0; n < 25; ++n) {
      const Vector x = random_interior_point(ball, r, 0.02 * r, rng);
      const Vector a = divergence_of_covariance(ball, x, 0.0,
                                                DivergenceMode::analytic);
      const Vector f = divergence_of_covariance(
          ball, x, 0.0, DivergenceMode::finite_difference);
      CHECK((a - f).norm() <= 1e-4 * a.norm());
    }
  }
}

TEST_CASE("finite-difference divergence agrees with differentiated closed form") {
  // Independent oracle: differentiate the rank-one covariance formula.
  Rng rng(23);
  const BallBarrier ball(4);
  for (int n = 0; n < 10; ++n) {
    const Vector x = random_interior_point(ball, 1.0, 0.05, rng);
    Vector expected = Vector::Zero(4);
    for (int j = 0; j < 4; ++j) {
      Vector p = x, m = x;
      p[j] += 1e-6;
      m[j] -= 1e-6;
      expected += (ball_covariance(p).col(j) - ball_covariance(m).col(j)) / 2e-6;
    }
    const Vector f = divergence_of_covariance(ball, x, 0.0);
    CHECK((f - expected).norm() <= 1e-6 * std::max(1.0, expected.norm()));
  }
}

TEST_CASE("divergence mode handling") {
  const BallBarrier ball(3);
  const auto box = PolytopeBarrier::box(Vector::Ones(3));
  const Vector x = Vector::Constant(3, 0.1);
  CHECK(divergence_of_covariance(ball, x, 0.0, DivergenceMode::none).isZero());
  CHECK_THROWS_AS(
      divergence_of_covariance(box, x, 0.0, DivergenceMode::analytic),
      DomainError);
  CHECK_THROWS_AS(
      divergence_of_covariance(ball, x, 1e-5, DivergenceMode::analytic),
      DomainError);
  CHECK_THROWS_AS(divergence_of_covariance(ball, Vector::Ones(3), 0.0),
                  NotInterior);
  CHECK(divergence_mode_from_string("analytic") == DivergenceMode::analytic);
  CHECK(to_string(DivergenceMode::finite_difference) == "finite_difference");
  CHECK_THROWS_AS(divergence_mode_from_string("exact"), DomainError);
}

TEST_CASE("finite-difference probes stay inside near the boundary") {
  const auto box = PolytopeBarrier::box(Vector::Ones(2));
  Vector x(2);
  x << 1.0 - 1e-7, 0.0;
  const Vector div = divergence_of_covariance(box, x, 1e-5);
  CHECK(div.allFinite());
}
