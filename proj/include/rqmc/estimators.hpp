#ifndef RQMC_ESTIMATORS_HPP
#define RQMC_ESTIMATORS_HPP

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <vector>

#include "rqmc/pointset.hpp"
#include "rqmc/transport.hpp"

namespace rqmc {

struct EvaluationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateWeightsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Deterministic pairwise (tree) reduction; the result does not depend on
// how work was split across threads for a fixed N.
double pairwise_sum(const double* data, std::size_t n);
double pairwise_sum(const std::vector<double>& v);

// Proposal draws with log-weights log w_i = log pi_bar(x_i) - log q(x_i)
// and test-function values f(x_i).
struct WeightedSample {
  Eigen::MatrixXd x;           // N x d
  std::vector<double> logw;
  std::vector<double> fvals;

  int size() const { return static_cast<int>(logw.size()); }
};

// Builds a WeightedSample by pushing every point of `ps` through `map`.
// Any non-finite log-density or f value aborts with the point index.
WeightedSample make_weighted_sample(const PointSet& ps, const TransportMap& map,
                                    const std::function<double(const Eigen::VectorXd&)>& log_target,
                                    const std::function<double(const Eigen::VectorXd&)>& log_proposal,
                                    const std::function<double(const Eigen::VectorXd&)>& f);

struct EstimateResult {
  double value = 0.0;
  double ess = 0.0;
  int n = 0;
};

// Plain (R)QMC average of f over the transported point set.
double rqmc_integrate(const std::function<double(const Eigen::VectorXd&)>& f, const TransportMap& map,
                      const PointSet& ps);

// Unnormalized IS average (1/N) sum w_i f_i; targets q(w f), the caller
// supplies any normalization.
double is_estimate(const WeightedSample& ws);

// Self-normalized ratio with max-log stabilized weights.
EstimateResult snis_estimate(const WeightedSample& ws);

// (sum w)^2 / sum w^2 with stabilized weights; scale-invariant.
double ess(const std::vector<double>& logw);

}  // namespace rqmc

#endif
