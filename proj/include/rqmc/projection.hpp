#ifndef RQMC_PROJECTION_HPP
#define RQMC_PROJECTION_HPP

#include <Eigen/Dense>

namespace rqmc {

// Radial smoothed truncation: identity inside radius (1-delta)r, zero
// outside r, with a Beta-CDF blend in between. Used as a property-test
// fixture; it never enters the estimators.
struct ProjectionParams {
  double r;
  double delta;  // in (0, 1/2), with (1-delta) r > 1
  int d;

  void validate() const;
};

// CDF of the symmetric Beta(d+1, d+1) distribution, evaluated via the
// exact polynomial antiderivative of s^d (1-s)^d.
double psi(double t, int d);

Eigen::VectorXd project(const Eigen::VectorXd& x, const ProjectionParams& params);

}  // namespace rqmc

#endif
