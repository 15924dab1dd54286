#include "rqmc/projection.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace rqmc {

void ProjectionParams::validate() const {
  if (!(r > 0.0)) throw std::invalid_argument("ProjectionParams: r must be positive");
  if (!(delta > 0.0 && delta < 0.5)) throw std::invalid_argument("ProjectionParams: delta must lie in (0, 1/2)");
  if (!((1.0 - delta) * r > 1.0)) throw std::invalid_argument("ProjectionParams: (1-delta) r must exceed 1");
  if (d < 1) throw std::invalid_argument("ProjectionParams: d must be positive");
}

double psi(double t, int d) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("psi: argument must lie in [0,1]");
  if (d < 1) throw std::invalid_argument("psi: d must be positive");

  // Binomial expansion: integral_0^t s^d (1-s)^d ds
  //   = sum_k binom(d,k) (-1)^k t^{d+k+1} / (d+k+1),
  // normalized by c = (2d+1)! / (d!)^2. Coefficients are exact rationals
  // assembled in long double before the final evaluation.
  long double binom = 1.0L;  // binom(d, k)
  long double acc = 0.0L;
  const long double tl = t;
  long double tpow = 1.0L;
  for (int i = 0; i < d + 1; ++i) tpow *= tl;  // t^{d+1}
  for (int k = 0; k <= d; ++k) {
    const long double term = binom * tpow / static_cast<long double>(d + k + 1);
    acc += (k % 2 == 0) ? term : -term;
    binom = binom * static_cast<long double>(d - k) / static_cast<long double>(k + 1);
    tpow *= tl;
  }
  long double c = 1.0L;  // (2d+1)! / (d!)^2 = (d+1) * binom(2d+1, d)
  for (int i = 1; i <= d; ++i) c = c * static_cast<long double>(d + i) / static_cast<long double>(i);
  c *= static_cast<long double>(2 * d + 1);
  return static_cast<double>(acc * c);
}

Eigen::VectorXd project(const Eigen::VectorXd& x, const ProjectionParams& params) {
  params.validate();
  const double rho = x.norm();
  const double inner = (1.0 - params.delta) * params.r;
  if (rho <= inner) return x;
  if (rho >= params.r) return Eigen::VectorXd::Zero(x.size());
  const double t = (rho - inner) / (params.delta * params.r);
  return (1.0 - psi(t, params.d)) * x;
}

}  // namespace rqmc
