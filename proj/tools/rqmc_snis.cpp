// Experiment CLI: replicated RQMC-SNIS runs, rate summaries, coverage
// studies, and a quick invariant self-test.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rqmc/diagnostics.hpp"
#include "rqmc/estimators.hpp"
#include "rqmc/harness.hpp"
#include "rqmc/rng.hpp"

namespace {

int resolve_threads(int cli_threads) {
  if (const char* env = std::getenv("RQMC_SNIS_THREADS")) {
    const int t = std::atoi(env);
    if (t > 0) return t;
  }
  return cli_threads > 0 ? cli_threads : 1;
}

int run_selftest() {
  using namespace rqmc;
  int failures = 0;
  auto check = [&](const char* name, bool ok) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << '\n';
    failures += !ok;
  };

  // 1D stratification of the first 2^m Sobol' points.
  {
    const auto ps = generate_sobol(2, 256);
    bool ok = true;
    for (int j = 0; j < 2 && ok; ++j) {
      std::vector<int> bins(256, 0);
      for (int i = 0; i < 256; ++i) ++bins[ps.raw(i, j) >> 24];
      for (int b : bins) ok = ok && b == 1;
    }
    check("sobol 1d stratification", ok);
  }
  // Scrambling preserves stratification and is deterministic.
  {
    const auto base = generate_sobol(2, 256);
    const auto s1 = scramble_owen(base, 42);
    const auto s2 = scramble_owen(base, 42);
    bool ok = s1.data() == s2.data();
    for (int j = 0; j < 2 && ok; ++j) {
      std::vector<int> bins(256, 0);
      for (int i = 0; i < 256; ++i) ++bins[s1.raw(i, j) >> 24];
      for (int b : bins) ok = ok && b == 1;
    }
    check("owen scramble determinism + stratification", ok);
  }
  // SNIS shift invariance and range bound.
  {
    WeightedSample ws;
    ws.logw = {0.4, -1.2, 2.0, 0.0};
    ws.fvals = {1.0, 2.0, 3.0, 4.0};
    auto a = snis_estimate(ws);
    for (auto& lw : ws.logw) lw += 123.0;
    auto b = snis_estimate(ws);
    // The shifted log-weights round differently before stabilization, so
    // equality holds to rounding, not bit-exactly.
    check("snis log-weight shift invariance", std::fabs(a.value - b.value) <= 1e-12 * std::fabs(a.value));
    check("snis range bound", a.value >= 1.0 && a.value <= 4.0);
  }
  // Inverse CDF round trip.
  {
    bool ok = true;
    for (double u : {1e-9, 0.01, 0.3, 0.5, 0.9, 1.0 - 1e-9}) {
      ok = ok && std::fabs(normal_cdf(normal_inv_cdf(u)) - u) < 1e-12;
      ok = ok && std::fabs(student_t_cdf(student_t_inv_cdf(u, 5.0), 5.0) - u) < 1e-10;
    }
    check("inverse cdf round trip", ok);
  }
  std::cout << (failures ? "selftest: FAILED\n" : "selftest: all green\n");
  return failures ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RQMC self-normalized importance sampling experiments"};
  app.require_subcommand(1);

  std::string config_path, out_dir, in_dir;
  int threads = 1;

  auto* run = app.add_subcommand("run", "run a replicated experiment from a JSON config");
  run->add_option("--config", config_path, "experiment config (JSON)")->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--threads", threads, "worker threads (env RQMC_SNIS_THREADS overrides)");

  auto* rates = app.add_subcommand("rates", "print fitted convergence rates from an output directory");
  rates->add_option("--in", in_dir, "directory holding errors.csv")->required();

  auto* coverage = app.add_subcommand("coverage", "Student-t confidence interval coverage study");
  coverage->add_option("--config", config_path, "coverage config (JSON)")->required();
  coverage->add_option("--out", out_dir, "output directory")->required();
  coverage->add_option("--threads", threads, "worker threads");

  app.add_subcommand("selftest", "run the built-in invariant suites");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("selftest")) return run_selftest();

    if (app.got_subcommand("run")) {
      auto cfg = rqmc::ExperimentConfig::load(config_path);
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      const auto report = rqmc::run_experiment(cfg, resolve_threads(threads));
      rqmc::emit_report(report, cfg.output_dir);
      for (const auto& [key, fit] : report.rates) {
        std::cout << rqmc::to_string(key.first) << " p=" << key.second << "  slope=" << fit.slope
                  << "  intercept=" << fit.intercept << '\n';
      }
      std::cout << "report written to " << cfg.output_dir << '\n';
      return 0;
    }

    if (app.got_subcommand("rates")) {
      const auto rows = rqmc::read_errors_csv((std::filesystem::path(in_dir) / "errors.csv").string());
      std::map<std::pair<std::string, double>, std::pair<std::vector<double>, std::vector<double>>> groups;
      for (const auto& r : rows) {
        auto& g = groups[{r.proposal, r.p}];
        g.first.push_back(std::log2(static_cast<double>(r.n)));
        g.second.push_back(std::log2(r.lp));
      }
      for (const auto& [key, g] : groups) {
        if (g.first.size() < 3) continue;
        const auto fit = rqmc::fit_rate(g.first, g.second);
        std::cout << key.first << " p=" << key.second << "  slope=" << fit.slope
                  << "  intercept=" << fit.intercept << "  residual=" << fit.residual << '\n';
      }
      return 0;
    }

    if (app.got_subcommand("coverage")) {
      std::ifstream f(config_path);
      if (!f) throw std::runtime_error("cannot open config file: " + config_path);
      nlohmann::json j;
      f >> j;
      const int r = j.value("R", 10);
      const double a = j.value("a", 0.025);
      const int meta_reps = j.value("meta_reps", 2000);
      const std::uint64_t seed = j.value("master_seed", std::uint64_t{1});
      const std::string mode = j.value("mode", std::string("gaussian_toy"));
      const int nthreads = resolve_threads(threads);

      double empirical = 0.0;
      std::string model = mode, proposal = "-";
      int n = 0;
      if (mode == "gaussian_toy") {
        empirical = rqmc::coverage_gaussian_toy(r, 0.0, a, meta_reps, seed, nthreads);
      } else if (mode == "inverse_problem") {
        // Conjugate known-truth cell: kappa = 1, scrambled Sobol', tIS.
        const int d = j.value("d", 5);
        n = j.value("N", 4096);
        const auto spec = rqmc::InverseProblemSpec::make(d, j.value("n", 20.0), 1.0);
        const double truth = rqmc::conjugate_reference(spec);
        const auto prop = rqmc::make_proposal(rqmc::build_proposal(rqmc::ProposalKind::tIS, spec));
        proposal = "tIS";
        const auto base = rqmc::generate_sobol(d, n);
        auto estimator = [&](std::uint64_t key, int rep) {
          const auto pts = rqmc::scramble_owen(base, rqmc::derive_key(key, static_cast<std::uint64_t>(rep)));
          const auto ws = rqmc::make_weighted_sample(
              pts, prop.map, [&](const Eigen::VectorXd& z) { return inverse_problem_log_unnorm_target(z, spec); },
              prop.log_density, [](const Eigen::VectorXd& x) { return x.squaredNorm(); });
          return rqmc::snis_estimate(ws).value;
        };
        empirical = rqmc::coverage_experiment(estimator, r, truth, a, meta_reps, seed, nthreads);
      } else {
        throw std::runtime_error("coverage: unknown mode " + mode);
      }

      std::filesystem::create_directories(out_dir);
      std::ofstream os(std::filesystem::path(out_dir) / "coverage.csv");
      os << "nominal,empirical,meta_reps,R,N,model,proposal\n";
      os.precision(17);
      os << (1.0 - 2.0 * a) << ',' << empirical << ',' << meta_reps << ',' << r << ',' << n << ',' << model << ','
         << proposal << '\n';
      std::cout << "empirical coverage: " << empirical << " (nominal " << 1.0 - 2.0 * a << ")\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
