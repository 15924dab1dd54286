#include "rqmc/diagnostics.hpp"

#include <cmath>
#include <thread>

#include "rqmc/estimators.hpp"
#include "rqmc/rng.hpp"
#include "rqmc/stats.hpp"

namespace rqmc {

MomentEstimates sample_skewness_kurtosis(const std::vector<double>& values) {
  const int r = static_cast<int>(values.size());
  if (r < 4) throw std::invalid_argument("sample_skewness_kurtosis: need at least 4 values");
  const double mean = pairwise_sum(values) / r;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : values) {
    const double e = v - mean;
    m2 += e * e;
    m3 += e * e * e;
    m4 += e * e * e * e;
  }
  m2 /= r;
  m3 /= r;
  m4 /= r;
  if (!(m2 > 0.0)) throw DegenerateSampleError("sample_skewness_kurtosis: zero sample variance");
  return {m3 / std::pow(m2, 1.5), m4 / (m2 * m2)};
}

CIResult student_t_ci(const std::vector<double>& values, double a) {
  const int r = static_cast<int>(values.size());
  if (r < 2) throw std::invalid_argument("student_t_ci: need at least 2 values");
  if (!(a > 0.0 && a < 0.5)) throw std::invalid_argument("student_t_ci: a must lie in (0, 0.5)");
  const double mean = pairwise_sum(values) / r;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double s = std::sqrt(ss / (r - 1));
  CIResult ci;
  ci.center = mean;
  ci.half_width = s > 0.0 ? student_t_inv_cdf(1.0 - a, r - 1) * s / std::sqrt(static_cast<double>(r)) : 0.0;
  ci.nominal = 1.0 - 2.0 * a;
  return ci;
}

double coverage_experiment(const std::function<double(std::uint64_t, int)>& estimator, int replicates,
                           double truth, double a, int meta_reps, std::uint64_t seed, int threads) {
  if (meta_reps < 1 || replicates < 2) throw std::invalid_argument("coverage_experiment: invalid sizes");
  std::vector<char> covered(meta_reps, 0);

  auto worker = [&](int begin, int end) {
    std::vector<double> values(replicates);
    for (int m = begin; m < end; ++m) {
      const std::uint64_t key = derive_key(seed, static_cast<std::uint64_t>(m));
      for (int r = 0; r < replicates; ++r) values[r] = estimator(key, r);
      const CIResult ci = student_t_ci(values, a);
      covered[m] = std::fabs(ci.center - truth) <= ci.half_width;
    }
  };

  const int nthreads = std::max(1, std::min(threads, meta_reps));
  if (nthreads == 1) {
    worker(0, meta_reps);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (meta_reps + nthreads - 1) / nthreads;
    for (int t = 0; t < nthreads; ++t) {
      const int begin = t * chunk, end = std::min(meta_reps, begin + chunk);
      if (begin < end) pool.emplace_back(worker, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  int hits = 0;
  for (char c : covered) hits += c;
  return static_cast<double>(hits) / meta_reps;
}

double coverage_gaussian_toy(int replicates, double truth, double a, int meta_reps, std::uint64_t seed,
                             int threads) {
  auto estimator = [truth](std::uint64_t key, int r) {
    CounterRng rng(derive_key(key, static_cast<std::uint64_t>(r)));
    return truth + normal_inv_cdf(rng.next_double());
  };
  return coverage_experiment(estimator, replicates, truth, a, meta_reps, seed, threads);
}

}  // namespace rqmc
