#pragma once

#include <functional>

namespace dikin {

/// Adaptive Simpson quadrature of f on [a, b] to absolute tolerance `tol`.
double integrate(const std::function<double(double)> &f, double a, double b,
                 double tol = 1e-13);

/// Regularized lower incomplete gamma P(s, x). Series for x < s + 1,
/// continued fraction (through Q = 1 - P) otherwise.
double regularized_gamma_p(double s, double x);

/// Regularized upper incomplete gamma Q(s, x) = Gamma(s, x) / Gamma(s).
double regularized_gamma_q(double s, double x);

} // namespace dikin
