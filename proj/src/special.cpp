#include "dikin/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dikin/errors.hpp"

namespace dikin {

namespace {

constexpr int kMaxDepth = 40;
constexpr int kMinDepth = 6;

double simpson_step(const std::function<double(double)> &f, double a, double b,
                    double fa, double fm, double fb, double whole, double tol,
                    int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  // The first levels always split so narrow peaks cannot hide between the
  // initial nodes.
  const bool deep_enough = depth <= kMaxDepth - kMinDepth;
  const double resolved =
      std::max(15.0 * tol, 1e-14 * std::abs(left + right));
  if (depth <= 0 || (deep_enough && std::abs(delta) <= resolved))
    return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

// Series for P(s, x).
double gamma_p_series(double s, double x) {
  double term = 1.0 / s;
  double sum = term;
  for (int n = 1; n < 10000; ++n) {
    term *= x / (s + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-17)
      break;
  }
  return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
}

// Modified Lentz continued fraction for Q(s, x).
double gamma_q_continued_fraction(double s, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - s;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny)
      d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny)
      c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16)
      break;
  }
  return std::exp(-x + s * std::log(x) - std::lgamma(s)) * h;
}

void check_gamma_args(double s, double x) {
  if (!(s > 0.0) || !(x >= 0.0))
    throw DomainError("incomplete gamma needs s > 0 and x >= 0");
}

} // namespace

double integrate(const std::function<double(double)> &f, double a, double b,
                 double tol) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, b, fa, fm, fb, whole, tol, kMaxDepth);
}

double regularized_gamma_p(double s, double x) {
  check_gamma_args(s, x);
  if (x == 0.0)
    return 0.0;
  if (x < s + 1.0)
    return gamma_p_series(s, x);
  return 1.0 - gamma_q_continued_fraction(s, x);
}

double regularized_gamma_q(double s, double x) {
  check_gamma_args(s, x);
  if (x == 0.0)
    return 1.0;
  if (x < s + 1.0)
    return 1.0 - gamma_p_series(s, x);
  return gamma_q_continued_fraction(s, x);
}

} // namespace dikin
