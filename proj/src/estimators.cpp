#include "rqmc/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rqmc {

double pairwise_sum(const double* data, std::size_t n) {
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = data[0];
    for (std::size_t i = 1; i < n; ++i) s += data[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

WeightedSample make_weighted_sample(const PointSet& ps, const TransportMap& map,
                                    const std::function<double(const Eigen::VectorXd&)>& log_target,
                                    const std::function<double(const Eigen::VectorXd&)>& log_proposal,
                                    const std::function<double(const Eigen::VectorXd&)>& f) {
  const int n = ps.count(), d = ps.dim();
  if (d != map.dim()) throw std::invalid_argument("make_weighted_sample: point set and map dimension mismatch");
  WeightedSample ws;
  ws.x.resize(n, d);
  ws.logw.resize(n);
  ws.fvals.resize(n);
  Eigen::VectorXd u(d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) u[j] = ps(i, j);
    const Eigen::VectorXd x = map.forward(u);
    ws.x.row(i) = x;
    const double lw = log_target(x) - log_proposal(x);
    const double fv = f(x);
    if (!std::isfinite(lw))
      throw EvaluationError("non-finite log-weight at point index " + std::to_string(i));
    if (!std::isfinite(fv))
      throw EvaluationError("non-finite f value at point index " + std::to_string(i));
    ws.logw[i] = lw;
    ws.fvals[i] = fv;
  }
  return ws;
}

double rqmc_integrate(const std::function<double(const Eigen::VectorXd&)>& f, const TransportMap& map,
                      const PointSet& ps) {
  const int n = ps.count(), d = ps.dim();
  if (d != map.dim()) throw std::invalid_argument("rqmc_integrate: point set and map dimension mismatch");
  std::vector<double> vals(n);
  Eigen::VectorXd u(d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) u[j] = ps(i, j);
    vals[i] = f(map.forward(u));
    if (!std::isfinite(vals[i]))
      throw EvaluationError("non-finite f value at point index " + std::to_string(i));
  }
  return pairwise_sum(vals) / n;
}

double is_estimate(const WeightedSample& ws) {
  const int n = ws.size();
  if (n < 1) throw std::invalid_argument("is_estimate: empty sample");
  std::vector<double> terms(n);
  for (int i = 0; i < n; ++i) {
    terms[i] = std::exp(ws.logw[i]) * ws.fvals[i];
    if (!std::isfinite(terms[i]))
      throw EvaluationError("is_estimate: overflow at point index " + std::to_string(i));
  }
  return pairwise_sum(terms) / n;
}

namespace {

// Weights exp(logw_i - max_j logw_j); the shifted form makes every
// downstream ratio scale-invariant in the weights.
std::vector<double> stabilized_weights(const std::vector<double>& logw) {
  const double m = *std::max_element(logw.begin(), logw.end());
  std::vector<double> w(logw.size());
  for (std::size_t i = 0; i < logw.size(); ++i) w[i] = std::exp(logw[i] - m);
  return w;
}

}  // namespace

EstimateResult snis_estimate(const WeightedSample& ws) {
  const int n = ws.size();
  if (n < 1) throw std::invalid_argument("snis_estimate: empty sample");
  const auto w = stabilized_weights(ws.logw);
  const double sw = pairwise_sum(w);
  if (!(sw > 0.0)) throw DegenerateWeightsError("snis_estimate: all weights underflowed to zero");
  std::vector<double> wf(n), w2(n);
  for (int i = 0; i < n; ++i) {
    wf[i] = w[i] * ws.fvals[i];
    w2[i] = w[i] * w[i];
  }
  EstimateResult res;
  res.value = pairwise_sum(wf) / sw;
  res.ess = sw * sw / pairwise_sum(w2);
  res.n = n;
  return res;
}

double ess(const std::vector<double>& logw) {
  if (logw.empty()) throw std::invalid_argument("ess: empty weight vector");
  const auto w = stabilized_weights(logw);
  const double sw = pairwise_sum(w);
  if (!(sw > 0.0)) throw DegenerateWeightsError("ess: all weights underflowed to zero");
  std::vector<double> w2(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) w2[i] = w[i] * w[i];
  return sw * sw / pairwise_sum(w2);
}

}  // namespace rqmc
