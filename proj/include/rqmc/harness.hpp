#ifndef RQMC_HARNESS_HPP
#define RQMC_HARNESS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rqmc/models.hpp"

namespace rqmc {

enum class Randomization { owen, digital_shift, iid };

std::string to_string(Randomization r);
Randomization randomization_from_string(const std::string& s);

enum class ModelKind { inverse_problem, logistic };

struct ExperimentConfig {
  ModelKind model = ModelKind::inverse_problem;
  InverseProblemSpec inverse;  // inverse_problem only
  std::string pima_path;       // logistic only
  std::vector<ProposalKind> proposals;
  std::vector<int> Ns;           // strictly increasing powers of two
  std::vector<double> ps;        // each >= 1
  int R = 50;
  std::uint64_t master_seed = 1;
  Randomization randomization = Randomization::owen;
  std::string output_dir = "out";

  void validate() const;
  std::string model_name() const;

  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::string& path);
};

struct CellResult {
  ProposalKind proposal;
  int n = 0;
  std::vector<double> estimates;   // replicate-level SNIS estimates
  double mean_estimate = 0.0;      // pi_hat(f), the replicate mean
  double ess_mean = 0.0;
  std::map<double, double> lp;     // p -> empirical L_p error
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
};

struct LpErrorReport {
  std::string model;
  ExperimentConfig cfg;
  std::vector<CellResult> cells;
  // (proposal, p) -> OLS fit of log2 Lp against log2 N
  std::map<std::pair<ProposalKind, double>, RateFit> rates;

  const CellResult& cell(ProposalKind proposal, int n) const;
};

LpErrorReport run_experiment(const ExperimentConfig& cfg, int threads = 1);

// Ordinary least squares of log2 error against log2 N; residual is the
// root-mean-square misfit. Needs at least 3 points.
RateFit fit_rate(const std::vector<double>& log2n, const std::vector<double>& log2err);

// Writes errors.csv, rates.csv, config.json, one SVG per p, and a gnuplot
// script alongside.
void emit_report(const LpErrorReport& report, const std::string& output_dir);

struct ErrorsCsvRow {
  std::string model;
  std::string proposal;
  int n = 0;
  double p = 0.0;
  double lp = 0.0;
  double mean_estimate = 0.0;
  double ess_mean = 0.0;
  int r = 0;
  std::uint64_t seed = 0;
};
std::vector<ErrorsCsvRow> read_errors_csv(const std::string& path);

}  // namespace rqmc

#endif
