#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rqmc/models.hpp"
#include "rqmc/rng.hpp"

using namespace rqmc;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {
const std::string kPimaPath = std::string(RQMC_SOURCE_DIR) + "/data/pima.csv";
}

TEST_CASE("inverse problem spec wiring") {
  const InverseProblemSpec spec = InverseProblemSpec::make(5, 20.0, 0.25);
  CHECK(spec.lambda == doctest::Approx(1.0).epsilon(1e-15));  // kappa^{-1/2} - 1 = 1
  CHECK(spec.prior_mu.isApprox(VectorXd::Ones(5)));
  CHECK(spec.prior_sigma.isApprox(MatrixXd::Identity(5, 5)));
  CHECK(InverseProblemSpec::make(5, 20.0, 1.0).lambda == 0.0);
}

TEST_CASE("misfit hand values and lower bound") {
  const InverseProblemSpec s1 = InverseProblemSpec::make(1, 20.0, 0.25);  // lambda = 1
  VectorXd z1(1);
  z1 << 1.0;
  const double expect = 0.5 * std::pow(1.0 + std::exp(-1.0), 2);
  CHECK(inverse_problem_psi(z1, s1) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(expect == doctest::Approx(0.93552).epsilon(1e-4));

  CounterRng rng(4);
  const InverseProblemSpec s5 = InverseProblemSpec::make(5, 20.0, 0.25);
  for (int rep = 0; rep < 200; ++rep) {
    VectorXd z(5);
    for (int j = 0; j < 5; ++j) z[j] = 6.0 * (rng.next_double() - 0.5);
    CHECK(inverse_problem_psi(z, s5) >= 0.5 * z.squaredNorm() - 1e-12);
  }
}

TEST_CASE("misfit curvature at the minimizer") {
  const InverseProblemSpec spec = InverseProblemSpec::make(3, 20.0, 0.25);
  const double h = 1e-5;
  // Gradient vanishes at 0 and the Hessian is kappa^{-1} I.
  for (int j = 0; j < 3; ++j) {
    VectorXd e = VectorXd::Zero(3);
    e[j] = h;
    const double g = (inverse_problem_psi(e, spec) - inverse_problem_psi(-e, spec)) / (2.0 * h);
    CHECK(std::abs(g) < 1e-8);
    const double hess =
        (inverse_problem_psi(e, spec) - 2.0 * inverse_problem_psi(VectorXd::Zero(3), spec) +
         inverse_problem_psi(-e, spec)) /
        (h * h);
    CHECK(hess == doctest::Approx(1.0 / spec.kappa).epsilon(1e-4));
  }
}

TEST_CASE("unnormalized log target special cases") {
  const int d = 3;
  const InverseProblemSpec gauss = InverseProblemSpec::make(d, 20.0, 1.0);  // lambda = 0
  CounterRng rng(6);
  for (int rep = 0; rep < 50; ++rep) {
    VectorXd z(d);
    for (int j = 0; j < d; ++j) z[j] = 4.0 * (rng.next_double() - 0.5);
    const double log_prior = -0.5 * d * std::log(2.0 * M_PI) - 0.5 * (z - VectorXd::Ones(d)).squaredNorm();
    const double expect = -gauss.n * 0.5 * z.squaredNorm() + log_prior;
    CHECK(inverse_problem_log_unnorm_target(z, gauss) == doctest::Approx(expect).epsilon(1e-12));
  }
  const VectorXd zero = VectorXd::Zero(d);
  const double at_zero = -0.5 * d * std::log(2.0 * M_PI) - 0.5 * d;
  CHECK(inverse_problem_log_unnorm_target(zero, gauss) == doctest::Approx(at_zero).epsilon(1e-13));
}

TEST_CASE("proposal catalogue") {
  const InverseProblemSpec spec = InverseProblemSpec::make(5, 20.0, 0.25);
  const ProposalSpec prior = build_proposal(ProposalKind::PriorIS, spec);
  CHECK(prior.mu.isApprox(VectorXd::Ones(5)));
  CHECK(prior.sigma.isApprox(MatrixXd::Identity(5, 5)));
  CHECK_FALSE(prior.nu.has_value());

  const ProposalSpec odis = build_proposal(ProposalKind::ODIS, spec);
  CHECK(odis.mu.norm() == 0.0);
  CHECK(odis.sigma.isApprox(MatrixXd::Identity(5, 5)));

  const ProposalSpec lap = build_proposal(ProposalKind::LapIS, spec);
  CHECK(lap.mu.norm() == 0.0);
  CHECK(lap.sigma.isApprox(0.0125 * MatrixXd::Identity(5, 5)));
  CHECK_FALSE(lap.nu.has_value());

  const ProposalSpec t0 = build_proposal(ProposalKind::tIS0, spec);
  CHECK(t0.mu.isApprox(VectorXd::Ones(5)));
  CHECK(t0.sigma.isApprox(MatrixXd::Identity(5, 5)));
  CHECK(t0.nu.value() == 5.0);

  const ProposalSpec tis = build_proposal(ProposalKind::tIS, spec);
  CHECK(tis.mu.norm() == 0.0);
  CHECK(tis.sigma.isApprox(0.0125 * MatrixXd::Identity(5, 5)));
  CHECK(tis.nu.value() == 5.0);

  CHECK(proposal_kind_from_string(to_string(ProposalKind::LapIS)) == ProposalKind::LapIS);
}

TEST_CASE("proposal log density normalizes against its own draws") {
  // SNIS of f = x_1 under pi_bar = q must be the plain mean; here we just
  // check the density integrates to ~1 by naive MC against the prior box.
  const InverseProblemSpec spec = InverseProblemSpec::make(2, 20.0, 1.0);
  const Proposal q = make_proposal(build_proposal(ProposalKind::PriorIS, spec));
  // Gaussian density value at the mean: (2 pi)^{-d/2}.
  CHECK(q.log_density(VectorXd::Ones(2)) == doctest::Approx(-std::log(2.0 * M_PI)).epsilon(1e-12));
}

TEST_CASE("logistic likelihood closed forms and gradient") {
  LogisticSpec toy;
  toy.X = MatrixXd::Ones(1, 1);
  toy.Y = VectorXd::Ones(1);
  VectorXd beta0 = VectorXd::Zero(1);
  CHECK(logistic_log_likelihood(beta0, toy) == doctest::Approx(-std::log(2.0)).epsilon(1e-14));

  LogisticSpec many;
  many.X = MatrixXd::Random(7, 3);
  many.Y = (VectorXd::Random(7).array() > 0.0).cast<double>();
  CHECK(logistic_log_likelihood(VectorXd::Zero(3), many) == doctest::Approx(-7.0 * std::log(2.0)).epsilon(1e-13));

  // Central finite differences of the unnormalized posterior.
  CounterRng rng(44);
  VectorXd beta(3);
  for (int j = 0; j < 3; ++j) beta[j] = 2.0 * (rng.next_double() - 0.5);
  const double h = 1e-6;
  const VectorXd p = (1.0 / (1.0 + (-(many.X * beta)).array().exp())).matrix();
  const VectorXd grad = many.X.transpose() * (many.Y - p) - beta;
  for (int j = 0; j < 3; ++j) {
    VectorXd e = VectorXd::Zero(3);
    e[j] = h;
    const double fd = (logistic_log_unnorm_posterior(beta + e, many) -
                       logistic_log_unnorm_posterior(beta - e, many)) /
                      (2.0 * h);
    CHECK(fd == doctest::Approx(grad[j]).epsilon(1e-6));
  }
}

TEST_CASE("laplace fit closed-form cases") {
  LogisticSpec null;
  null.X = MatrixXd::Zero(4, 2);
  null.Y = VectorXd::Zero(4);
  const LaplaceFit f0 = laplace_fit(null);
  CHECK(f0.mu_star.norm() < 1e-12);
  CHECK(f0.sigma_star.isApprox(MatrixXd::Identity(2, 2), 1e-12));

  LogisticSpec two;
  two.X = MatrixXd::Ones(2, 1);
  two.Y.resize(2);
  two.Y << 1.0, 0.0;
  const LaplaceFit f2 = laplace_fit(two);
  CHECK(std::abs(f2.mu_star[0]) < 1e-10);
  CHECK(f2.sigma_star(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("laplace fit satisfies its fixed point on the dataset") {
  const LogisticSpec spec = load_pima(kPimaPath);
  const LaplaceFit fit = laplace_fit(spec);
  const VectorXd p = (1.0 / (1.0 + (-(spec.X * fit.mu_star)).array().exp())).matrix();
  const VectorXd grad = spec.X.transpose() * (spec.Y - p) - fit.mu_star;
  CHECK(grad.norm() <= 1e-8);
  // Curvature is positive definite.
  Eigen::LLT<MatrixXd> llt(fit.sigma_star);
  CHECK(llt.info() == Eigen::Success);
  // Deterministic across runs.
  const LaplaceFit again = laplace_fit(load_pima(kPimaPath));
  CHECK((again.mu_star - fit.mu_star).norm() == 0.0);
}

TEST_CASE("dataset ingestion") {
  const LogisticSpec spec = load_pima(kPimaPath);
  CHECK(spec.X.rows() == 392);
  CHECK(spec.X.cols() == 9);
  CHECK(spec.X.col(0).isApprox(VectorXd::Ones(392)));
  for (int j = 1; j < 9; ++j) {
    CHECK(std::abs(spec.X.col(j).mean()) < 1e-12);
    const double sd = std::sqrt(spec.X.col(j).squaredNorm() / 391.0);
    CHECK(std::abs(sd - 1.0) < 1e-12);
  }
  for (int i = 0; i < 392; ++i) CHECK((spec.Y[i] == 0.0 || spec.Y[i] == 1.0));

  // A truncated copy must be rejected.
  std::ifstream in(kPimaPath);
  std::ostringstream truncated;
  std::string line;
  for (int i = 0; i <= 391 && std::getline(in, line); ++i) truncated << line << "\n";
  const std::string tmp = "/tmp/pima_391.csv";
  std::ofstream(tmp) << truncated.str();
  CHECK_THROWS_AS(load_pima(tmp), IngestionError);
  CHECK_THROWS_AS(load_pima("/nonexistent/pima.csv"), IngestionError);
}

TEST_CASE("conjugate posterior reference values") {
  CHECK(conjugate_reference(InverseProblemSpec::make(5, 20.0, 1.0)) ==
        doctest::Approx(110.0 / 441.0).epsilon(1e-15));
  CHECK(conjugate_reference(InverseProblemSpec::make(1, 0.0, 1.0)) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(conjugate_reference(InverseProblemSpec::make(30, 20.0, 1.0)) ==
        doctest::Approx(30.0 * 22.0 / 441.0).epsilon(1e-12));
  CHECK_THROWS(conjugate_reference(InverseProblemSpec::make(5, 20.0, 0.25)));
}
