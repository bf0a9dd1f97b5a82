#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

// Tail probabilities for the distributions the test battery needs.
// Everything is built on erfc, the regularized incomplete beta and the
// regularized incomplete gamma, evaluated to well below 1e-12 so p-values
// are exact at the reported precision.

namespace credulens::dist {

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / 1.4142135623730950488); }

// 1 - Phi(z), computed through erfc so the far tail keeps full precision.
inline double normal_sf(double z) { return 0.5 * std::erfc(z / 1.4142135623730950488); }

namespace detail {

inline constexpr int kMaxIter = 300;
inline constexpr double kEps = 1e-15;

// Continued fraction for the incomplete beta (Lentz's method).
inline double betacf(double a, double b, double x) {
  const double tiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

// Series for the lower incomplete gamma P(a,x), x < a+1.
inline double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 1; n <= kMaxIter; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for the upper incomplete gamma Q(a,x), x >= a+1.
inline double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace detail

// Regularized incomplete beta I_x(a, b).
inline double reg_inc_beta(double a, double b, double x) {
  if (a <= 0.0 || b <= 0.0) throw std::invalid_argument("reg_inc_beta: a,b must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::betacf(a, b, x) / a;
  return 1.0 - front * detail::betacf(b, a, 1.0 - x) / b;
}

// Regularized upper incomplete gamma Q(a, x).
inline double reg_gamma_q(double a, double x) {
  if (a <= 0.0) throw std::invalid_argument("reg_gamma_q: a must be positive");
  if (x <= 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
  return detail::gamma_q_cf(a, x);
}

// P(T > t) for Student's t with df degrees of freedom.
inline double student_t_sf(double t, double df) {
  if (df <= 0.0) throw std::invalid_argument("student_t_sf: df must be positive");
  const double x = df / (df + t * t);
  const double half_tail = 0.5 * reg_inc_beta(0.5 * df, 0.5, x);
  return t >= 0.0 ? half_tail : 1.0 - half_tail;
}

inline double student_t_two_tailed(double t, double df) {
  return std::min(1.0, 2.0 * student_t_sf(std::fabs(t), df));
}

// P(F > f) with (d1, d2) degrees of freedom.
inline double f_sf(double f, double d1, double d2) {
  if (d1 <= 0.0 || d2 <= 0.0) throw std::invalid_argument("f_sf: df must be positive");
  if (f <= 0.0) return 1.0;
  return reg_inc_beta(0.5 * d2, 0.5 * d1, d2 / (d2 + d1 * f));
}

// P(X > x) for chi-square. df = 1 reduces to a normal tail.
inline double chi2_sf(double x, double df) {
  if (df <= 0.0) throw std::invalid_argument("chi2_sf: df must be positive");
  if (x <= 0.0) return 1.0;
  if (df == 1.0) return 2.0 * normal_sf(std::sqrt(x));
  return reg_gamma_q(0.5 * df, 0.5 * x);
}

}  // namespace credulens::dist
