#ifndef RQMC_DIAGNOSTICS_HPP
#define RQMC_DIAGNOSTICS_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace rqmc {

struct DegenerateSampleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Plug-in standardized third and fourth central moments (kurtosis is
// non-excess) of the replicate estimates.
struct MomentEstimates {
  double skewness = 0.0;
  double kurtosis = 0.0;
};
MomentEstimates sample_skewness_kurtosis(const std::vector<double>& values);

struct CIResult {
  double center = 0.0;
  double half_width = 0.0;
  double nominal = 0.0;  // 1 - 2a
  std::optional<bool> covered;
};

// Xbar +/- t_{R-1}^{1-a} S / sqrt(R) with S the unbiased standard
// deviation; the t quantile comes from the shared inverse CDF.
CIResult student_t_ci(const std::vector<double>& values, double a);

// Repeats the full R-replicate CI construction meta_reps times with fresh
// master seeds drawn from `seed`, and returns the fraction of intervals
// containing `truth`. `estimator(key, r)` must return replicate r of an
// estimate under master key `key`.
double coverage_experiment(const std::function<double(std::uint64_t key, int replicate)>& estimator,
                           int replicates, double truth, double a, int meta_reps, std::uint64_t seed,
                           int threads = 1);

// IID N(truth, 1) replicate values: the no-estimator-in-the-loop toy.
double coverage_gaussian_toy(int replicates, double truth, double a, int meta_reps, std::uint64_t seed,
                             int threads = 1);

}  // namespace rqmc

#endif
