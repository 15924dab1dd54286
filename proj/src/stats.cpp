#include "rqmc/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rqmc {
namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInvSqrt2Pi = 0.3989422804014327;

void require_open_unit(double u, const char* op) {
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error(std::string(op) + ": argument must lie in (0,1)");
}

// Acklam's rational approximation to the normal quantile (~1e-9 absolute),
// used as the starting point for the Halley polish.
double norm_inv_approx(double u) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                             1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                             6.680131188771972e+01,  -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                             -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                             3.754408661907416e+00};
  constexpr double plow = 0.02425;
  if (u < plow) {
    const double q = std::sqrt(-2.0 * std::log(u));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (u > 1.0 - plow) return -norm_inv_approx(1.0 - u);
  const double q = u - 0.5, r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_inv_cdf(double u) {
  require_open_unit(u, "normal_inv_cdf");
  // Work in the lower tail where erfc keeps full relative accuracy.
  if (u > 0.5) return -normal_inv_cdf(1.0 - u);
  double x = norm_inv_approx(u);
  for (int it = 0; it < 2; ++it) {
    const double e = normal_cdf(x) - u;
    const double p = normal_pdf(x);
    if (p <= 0.0) break;
    const double t = e / p;
    x -= t / (1.0 + 0.5 * t * x);  // Halley
  }
  return x;
}

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double lbeta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  const double front = std::exp(a * std::log(x) + b * std::log1p(-x) - lbeta);
  if (x > (a + 1.0) / (a + b + 2.0)) return 1.0 - incomplete_beta(b, a, 1.0 - x);

  // Lentz continued fraction.
  constexpr double tiny = 1e-300;
  double c = 1.0, d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 300; ++m) {
    const double m2 = 2.0 * m;
    double num = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
    d = 1.0 + num * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + num / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    num = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
    d = 1.0 + num * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + num / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return front * h / a;
}

double student_t_cdf(double x, double nu) {
  if (nu <= 0.0) throw std::domain_error("student_t_cdf: nu must be positive");
  if (x == 0.0) return 0.5;
  const double ib = incomplete_beta(nu / 2.0, 0.5, nu / (nu + x * x));
  return x > 0.0 ? 1.0 - 0.5 * ib : 0.5 * ib;
}

double student_t_log_pdf(double x, double nu) {
  const double lc = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                    0.5 * std::log(nu * 3.141592653589793);
  return lc - 0.5 * (nu + 1.0) * std::log1p(x * x / nu);
}

double student_t_pdf(double x, double nu) { return std::exp(student_t_log_pdf(x, nu)); }

double student_t_inv_cdf(double u, double nu) {
  require_open_unit(u, "student_t_inv_cdf");
  if (nu <= 0.0) throw std::domain_error("student_t_inv_cdf: nu must be positive");
  if (u == 0.5) return 0.0;
  if (u > 0.5) return -student_t_inv_cdf(1.0 - u, nu);

  // Bracket the root in the lower tail, then Newton with bisection fallback.
  double hi = 0.0;
  double lo = -1.0;
  while (student_t_cdf(lo, nu) > u) {
    hi = lo;
    lo *= 8.0;
    if (lo < -1e200) break;
  }
  double x = nu == 1.0 ? std::tan(3.141592653589793 * (u - 0.5))
                       : normal_inv_cdf(u) * std::sqrt(nu / std::max(nu - 2.0, 0.5));
  if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
  for (int it = 0; it < 100; ++it) {
    const double e = student_t_cdf(x, nu) - u;
    if (std::fabs(e) < 1e-14) return x;
    if (e > 0.0) hi = x; else lo = x;
    const double p = student_t_pdf(x, nu);
    double step = p > 0.0 ? e / p : 0.0;
    double xn = x - step;
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
    if (xn == x) return x;
    x = xn;
  }
  return x;
}

}  // namespace rqmc
