#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "rqmc/projection.hpp"
#include "rqmc/rng.hpp"
#include "rqmc/stats.hpp"

using namespace rqmc;
using Eigen::VectorXd;

namespace {

// Weights of a one-sided k-th derivative stencil on nodes {0, h, ..., (npts-1)h},
// solved from the Vandermonde moment conditions.
std::vector<double> stencil_weights(int k, int npts, double h) {
  // Solve on integer nodes, then rescale by h^k for conditioning.
  Eigen::MatrixXd a(npts, npts);
  for (int i = 0; i < npts; ++i)
    for (int j = 0; j < npts; ++j) a(i, j) = std::pow(static_cast<double>(j), i);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(npts);
  double kfact = 1.0;
  for (int i = 2; i <= k; ++i) kfact *= i;
  b[k] = kfact;
  Eigen::VectorXd w = a.fullPivLu().solve(b);
  w /= std::pow(h, k);
  return {w.data(), w.data() + npts};
}

VectorXd random_direction(CounterRng& rng, int d) {
  VectorXd v(d);
  for (int j = 0; j < d; ++j) v[j] = normal_inv_cdf(rng.next_double());
  return v.normalized();
}

}  // namespace

TEST_CASE("psi closed-form values") {
  for (const int d : {1, 2, 3, 4, 5}) {
    CHECK(psi(0.0, d) == 0.0);
    CHECK(psi(1.0, d) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(psi(0.5, d) == doctest::Approx(0.5).epsilon(1e-14));
  }
  // d=1: psi(t) = 3t^2 - 2t^3.
  CHECK(psi(0.25, 1) == doctest::Approx(0.15625).epsilon(1e-15));
  CHECK_THROWS(psi(-0.1, 1));
  CHECK_THROWS(psi(1.1, 1));
}

TEST_CASE("psi symmetry and monotonicity") {
  for (const int d : {1, 3, 5}) {
    double prev = -1.0;
    for (int i = 0; i <= 1000; ++i) {
      const double t = i / 1000.0;
      const double v = psi(t, d);
      CHECK(v >= prev);
      prev = v;
      CHECK(std::abs(psi(t, d) + psi(1.0 - t, d) - 1.0) < 1e-13);
    }
  }
}

TEST_CASE("psi endpoint derivatives vanish numerically") {
  // One-sided stencils with 4 extra nodes; the t=1 side reuses the t=0
  // stencil through the symmetry psi(1-s) = 1 - psi(s), which keeps the
  // evaluations on the flat tail where cancellation is benign.
  const double h = 1e-4;
  for (int d = 1; d <= 5; ++d) {
    for (int k = 1; k <= d; ++k) {
      const int npts = k + 4;
      const std::vector<double> w = stencil_weights(k, npts, h);
      double est0 = 0.0;
      for (int j = 0; j < npts; ++j) est0 += w[j] * psi(j * h, d);
      CHECK(std::abs(est0) <= 10.0 * h);
    }
  }
}

TEST_CASE("psi interior derivative magnitudes stay bounded") {
  // |D^k psi| <= c * max|D^{k-1} zeta| with zeta = s^d (1-s)^d; a loose
  // numeric ceiling suffices here.
  const double h = 1e-4;
  for (const int d : {2, 3}) {
    for (int k = 1; k <= d; ++k) {
      const int npts = k + 4;
      const std::vector<double> w = stencil_weights(k, npts, h);
      for (int g = 1; g < 20; ++g) {
        const double t = g / 20.0;
        double est = 0.0;
        for (int j = 0; j < npts; ++j) est += w[j] * psi(t + j * h, d);
        CHECK(std::isfinite(est));
        CHECK(std::abs(est) < 1e4);
      }
    }
  }
}

TEST_CASE("projection branch values") {
  ProjectionParams params{10.0, 0.1, 3};
  params.validate();
  CounterRng rng(31);
  const VectorXd dir = random_direction(rng, 3);
  // Inside the inner radius: identity.
  CHECK((project(5.0 * dir, params) - 5.0 * dir).norm() == 0.0);
  // Outside r: zero.
  CHECK(project(11.0 * dir, params).norm() == 0.0);
  // Midpoint of the blend: psi(1/2) = 1/2 halves the vector.
  const VectorXd mid = project(9.5 * dir, params);
  CHECK((mid - 0.5 * 9.5 * dir).norm() < 1e-12);
}

TEST_CASE("projection parameter validation") {
  CHECK_THROWS(ProjectionParams{10.0, 0.6, 2}.validate());
  CHECK_THROWS(ProjectionParams{1.0, 0.4, 2}.validate());  // (1-delta) r <= 1
}

TEST_CASE("projection norm bounds on randomized inputs") {
  CounterRng rng(77);
  const std::vector<ProjectionParams> fixtures = {
      {10.0, 0.1, 3}, {5.0, 0.05, 2}, {4.0, 0.25, 5}};
  for (const auto& params : fixtures) {
    params.validate();
    const double cap = (1.0 - params.delta / 2.0) * params.r;
    for (int rep = 0; rep < 33334; ++rep) {
      const VectorXd dir = random_direction(rng, params.d);
      // Radii spanning all three branches plus the exact seams.
      double rho;
      switch (rep % 5) {
        case 0: rho = rng.next_double() * (1.0 - params.delta) * params.r; break;
        case 1: rho = (1.0 - params.delta) * params.r; break;
        case 2: rho = params.r * (1.0 - params.delta * rng.next_double()); break;
        case 3: rho = params.r; break;
        default: rho = params.r * (1.0 + 2.0 * rng.next_double()); break;
      }
      const VectorXd x = rho * dir;
      const double pn = project(x, params).norm();
      CHECK(pn <= x.norm() * (1.0 + 1e-14) + 1e-14);
      CHECK(pn <= cap * (1.0 + 1e-14));
    }
  }
}

TEST_CASE("projection is continuous across the seams") {
  ProjectionParams params{10.0, 0.1, 3};
  CounterRng rng(13);
  const double h = 1e-7;
  for (const double seam : {(1.0 - params.delta) * params.r, params.r}) {
    for (int rep = 0; rep < 50; ++rep) {
      const VectorXd dir = random_direction(rng, 3);
      const VectorXd lo = project((seam - h) * dir, params);
      const VectorXd hi = project((seam + h) * dir, params);
      CHECK((hi - lo).norm() < 1e-5);
    }
  }
}
