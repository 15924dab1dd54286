#include <doctest.h>

#include <cmath>
#include <vector>

#include "rqmc/diagnostics.hpp"
#include "rqmc/rng.hpp"
#include "rqmc/stats.hpp"

using namespace rqmc;

TEST_CASE("skewness and kurtosis hand values") {
  const MomentEstimates sym = sample_skewness_kurtosis({-1.0, 1.0, -1.0, 1.0});
  CHECK(sym.skewness == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(sym.kurtosis == doctest::Approx(1.0).epsilon(1e-14));

  // {0,0,0,1}: m2 = 3/16, m3 = 3/32, m4 = 21/256.
  const MomentEstimates bern = sample_skewness_kurtosis({0.0, 0.0, 0.0, 1.0});
  CHECK(bern.skewness == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-13));
  CHECK(bern.kurtosis == doctest::Approx(7.0 / 3.0).epsilon(1e-13));

  CHECK_THROWS_AS(sample_skewness_kurtosis({2.0, 2.0, 2.0, 2.0}), DegenerateSampleError);
  CHECK_THROWS(sample_skewness_kurtosis({1.0, 2.0, 3.0}));  // R >= 4
}

TEST_CASE("moment estimator invariances") {
  CounterRng rng(1);
  std::vector<double> x;
  for (int i = 0; i < 40; ++i) x.push_back(rng.next_double());
  const MomentEstimates base = sample_skewness_kurtosis(x);
  std::vector<double> shifted = x, scaled = x, flipped = x;
  for (auto& v : shifted) v += 17.0;
  for (auto& v : scaled) v *= 3.0;
  for (auto& v : flipped) v *= -2.0;
  const MomentEstimates s = sample_skewness_kurtosis(shifted);
  const MomentEstimates c = sample_skewness_kurtosis(scaled);
  const MomentEstimates f = sample_skewness_kurtosis(flipped);
  CHECK(s.skewness == doctest::Approx(base.skewness).epsilon(1e-10));
  CHECK(s.kurtosis == doctest::Approx(base.kurtosis).epsilon(1e-10));
  CHECK(c.skewness == doctest::Approx(base.skewness).epsilon(1e-12));
  CHECK(c.kurtosis == doctest::Approx(base.kurtosis).epsilon(1e-12));
  CHECK(f.skewness == doctest::Approx(-base.skewness).epsilon(1e-12));
  CHECK(f.kurtosis == doctest::Approx(base.kurtosis).epsilon(1e-12));
}

TEST_CASE("student t confidence interval") {
  const CIResult flat = student_t_ci({3.0, 3.0, 3.0}, 0.025);
  CHECK(flat.center == 3.0);
  CHECK(flat.half_width == 0.0);

  // R=2, {0,2}, a=0.025: half width is exactly the t quantile at 1 dof.
  const CIResult two = student_t_ci({0.0, 2.0}, 0.025);
  CHECK(two.center == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(two.half_width == doctest::Approx(12.7062).epsilon(1e-5));
  CHECK(two.nominal == doctest::Approx(0.95).epsilon(1e-15));

  const CIResult dbl = student_t_ci({0.0, 4.0}, 0.025);
  CHECK(dbl.center == doctest::Approx(2.0 * two.center).epsilon(1e-14));
  CHECK(dbl.half_width == doctest::Approx(2.0 * two.half_width).epsilon(1e-12));
}

TEST_CASE("half width shrinks with more replicates at fixed spread") {
  // Synthetic samples with identical unbiased S: alternating +/- s.
  double prev = 1e300;
  for (const int r : {4, 8, 16, 64}) {
    std::vector<double> v;
    for (int i = 0; i < r; ++i) v.push_back(i % 2 == 0 ? 1.0 : -1.0);
    const CIResult ci = student_t_ci(v, 0.025);
    CHECK(ci.half_width < prev);
    prev = ci.half_width;
  }
}

TEST_CASE("gaussian toy coverage") {
  const double cov = coverage_gaussian_toy(10, 0.0, 0.025, 2000, 424242, 4);
  CHECK(cov >= 0.94);
  CHECK(cov <= 0.96);
  // Determinism across thread counts.
  CHECK(coverage_gaussian_toy(10, 0.0, 0.025, 200, 7, 1) ==
        coverage_gaussian_toy(10, 0.0, 0.025, 200, 7, 3));
}

TEST_CASE("coverage degenerate regimes") {
  // a -> 0.5 collapses the interval width.
  CHECK(coverage_gaussian_toy(10, 0.0, 0.499, 500, 11, 2) <= 0.1);
  // Truth far outside the data range is never covered.
  const auto std_normal = [](std::uint64_t key, int r) {
    CounterRng rng(derive_key(key, static_cast<std::uint64_t>(r)));
    return normal_inv_cdf(rng.next_double());
  };
  CHECK(coverage_experiment(std_normal, 10, 1e6, 0.025, 500, 11, 2) == 0.0);
}

TEST_CASE("coverage experiment with a custom estimator") {
  // Replicates exactly equal to the truth: a zero-width interval still covers.
  const auto exact = [](std::uint64_t, int) { return 5.0; };
  CHECK(coverage_experiment(exact, 10, 5.0, 0.025, 100, 3, 2) == 1.0);
}
