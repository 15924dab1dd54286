#ifndef RQMC_MODELS_HPP
#define RQMC_MODELS_HPP

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

#include "rqmc/transport.hpp"

namespace rqmc {

struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IngestionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Toy Bayesian inverse problem: forward map G(z) = z + lambda F(z) with
// F(z) = (z_i exp(-z_i^2)), observation y = 0, noise level n, and a
// standard-width Gaussian prior centered at 1. Configured through kappa;
// lambda = kappa^{-1/2} - 1.
struct InverseProblemSpec {
  int d = 5;
  double n = 20.0;
  double kappa = 1.0;
  double lambda = 0.0;
  Eigen::VectorXd prior_mu;     // = 1
  Eigen::MatrixXd prior_sigma;  // = I

  static InverseProblemSpec make(int d, double n, double kappa);
};

double inverse_problem_psi(const Eigen::VectorXd& z, const InverseProblemSpec& spec);
double inverse_problem_log_unnorm_target(const Eigen::VectorXd& z, const InverseProblemSpec& spec);

enum class ProposalKind { PriorIS, ODIS, LapIS, tIS0, tIS, custom };

std::string to_string(ProposalKind k);
ProposalKind proposal_kind_from_string(const std::string& s);

struct ProposalSpec {
  ProposalKind kind = ProposalKind::custom;
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;
  std::optional<double> nu;  // present iff Student-t proposal
};

ProposalSpec build_proposal(ProposalKind kind, const InverseProblemSpec& spec);

// Runtime object for a location-scale proposal: the transport map
// mu + L G^{-1}(u) with L L^T = Sigma, plus the matching log-density.
struct Proposal {
  ProposalSpec spec;
  TransportMap map;
  std::function<double(const Eigen::VectorXd&)> log_density;
};

Proposal make_proposal(const ProposalSpec& spec);

// Bayesian logistic regression with standard Gaussian prior on the
// coefficients.
struct LogisticSpec {
  Eigen::MatrixXd X;  // m x d, intercept column included
  Eigen::VectorXd Y;  // entries in {0,1}
};

double logistic_log_likelihood(const Eigen::VectorXd& beta, const LogisticSpec& spec);
double logistic_log_unnorm_posterior(const Eigen::VectorXd& beta, const LogisticSpec& spec);

struct LaplaceFit {
  Eigen::VectorXd mu_star;
  Eigen::MatrixXd sigma_star;
  int iterations = 0;
};

LaplaceFit laplace_fit(const LogisticSpec& spec, double tol = 1e-10, int max_iter = 100);

// Pima CSV: header row, 8 numeric predictors, binary label. Predictors are
// standardized and an intercept column of ones is prepended: (m, d) =
// (392, 9).
LogisticSpec load_pima(const std::string& path);

// Closed-form posterior mean of ||Z||^2 in the conjugate (lambda = 0) case:
// posterior N(1/(n+1) 1, 1/(n+1) I).
double conjugate_reference(const InverseProblemSpec& spec);

}  // namespace rqmc

#endif
