#include "rqmc/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "rqmc/estimators.hpp"
#include "rqmc/rng.hpp"

namespace rqmc {

std::string to_string(Randomization r) {
  switch (r) {
    case Randomization::owen: return "owen";
    case Randomization::digital_shift: return "digital_shift";
    case Randomization::iid: return "iid";
  }
  return "?";
}

Randomization randomization_from_string(const std::string& s) {
  if (s == "owen") return Randomization::owen;
  if (s == "digital_shift") return Randomization::digital_shift;
  if (s == "iid") return Randomization::iid;
  throw std::invalid_argument("unknown randomization: " + s);
}

void ExperimentConfig::validate() const {
  if (R < 2) throw std::invalid_argument("ExperimentConfig: R must be at least 2");
  if (proposals.empty() || Ns.empty() || ps.empty())
    throw std::invalid_argument("ExperimentConfig: proposals, Ns and ps must be non-empty");
  for (std::size_t i = 1; i < Ns.size(); ++i) {
    if (Ns[i] <= Ns[i - 1]) throw std::invalid_argument("ExperimentConfig: Ns must be strictly increasing");
  }
  for (double p : ps) {
    if (!(p >= 1.0)) throw std::invalid_argument("ExperimentConfig: every p must be >= 1");
  }
  if (model == ModelKind::logistic && pima_path.empty())
    throw std::invalid_argument("ExperimentConfig: logistic model needs a data path");
}

std::string ExperimentConfig::model_name() const {
  if (model == ModelKind::logistic) return "logistic";
  std::ostringstream os;
  os << "inverse_problem_d" << inverse.d << "_kappa" << inverse.kappa;
  return os.str();
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  if (model == ModelKind::inverse_problem) {
    j["model"] = {{"kind", "inverse_problem"},
                  {"d", inverse.d},
                  {"n", inverse.n},
                  {"kappa", inverse.kappa},
                  {"lambda", inverse.lambda}};
  } else {
    j["model"] = {{"kind", "logistic"}, {"data", pima_path}};
  }
  auto props = nlohmann::json::array();
  for (auto k : proposals) props.push_back(to_string(k));
  j["proposals"] = props;
  j["Ns"] = Ns;
  j["ps"] = ps;
  j["R"] = R;
  j["master_seed"] = master_seed;
  j["randomization"] = to_string(randomization);
  j["output_dir"] = output_dir;
  j["prng"] = std::string(kPrngName);
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  const auto& jm = j.at("model");
  const std::string kind = jm.at("kind").get<std::string>();
  if (kind == "inverse_problem") {
    cfg.model = ModelKind::inverse_problem;
    cfg.inverse = InverseProblemSpec::make(jm.at("d").get<int>(), jm.at("n").get<double>(),
                                           jm.at("kappa").get<double>());
  } else if (kind == "logistic") {
    cfg.model = ModelKind::logistic;
    cfg.pima_path = jm.at("data").get<std::string>();
  } else {
    throw std::invalid_argument("ExperimentConfig: unknown model kind " + kind);
  }
  for (const auto& p : j.at("proposals")) cfg.proposals.push_back(proposal_kind_from_string(p.get<std::string>()));
  cfg.Ns = j.at("Ns").get<std::vector<int>>();
  cfg.ps = j.at("ps").get<std::vector<double>>();
  cfg.R = j.value("R", 50);
  cfg.master_seed = j.value("master_seed", std::uint64_t{1});
  cfg.randomization = randomization_from_string(j.value("randomization", std::string("owen")));
  cfg.output_dir = j.value("output_dir", std::string("out"));
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file: " + path);
  nlohmann::json j;
  f >> j;
  return from_json(j);
}

const CellResult& LpErrorReport::cell(ProposalKind proposal, int n) const {
  for (const auto& c : cells) {
    if (c.proposal == proposal && c.n == n) return c;
  }
  throw std::out_of_range("LpErrorReport: no such cell");
}

namespace {

struct ModelFunctions {
  std::function<double(const Eigen::VectorXd&)> log_target;
  std::function<double(const Eigen::VectorXd&)> f;
  int dim;
};

ModelFunctions make_model(const ExperimentConfig& cfg, const std::optional<LaplaceFit>& fit,
                          const std::shared_ptr<LogisticSpec>& logistic) {
  ModelFunctions m;
  m.f = [](const Eigen::VectorXd& x) { return x.squaredNorm(); };
  if (cfg.model == ModelKind::inverse_problem) {
    m.dim = cfg.inverse.d;
    m.log_target = [spec = cfg.inverse](const Eigen::VectorXd& z) {
      return inverse_problem_log_unnorm_target(z, spec);
    };
  } else {
    (void)fit;
    m.dim = static_cast<int>(logistic->X.cols());
    m.log_target = [logistic](const Eigen::VectorXd& b) { return logistic_log_unnorm_posterior(b, *logistic); };
  }
  return m;
}

Proposal resolve_proposal(const ExperimentConfig& cfg, ProposalKind kind,
                          const std::optional<LaplaceFit>& fit) {
  if (cfg.model == ModelKind::inverse_problem) return make_proposal(build_proposal(kind, cfg.inverse));
  // Logistic model: both proposals are centered on the Laplace fit.
  ProposalSpec spec;
  spec.kind = kind;
  spec.mu = fit->mu_star;
  spec.sigma = fit->sigma_star;
  if (kind == ProposalKind::tIS) {
    spec.nu = 5.0;
  } else if (kind != ProposalKind::LapIS) {
    throw std::invalid_argument("logistic model supports only LapIS and tIS proposals");
  }
  return make_proposal(spec);
}

PointSet make_points(Randomization rand, const PointSet& sobol_base, int dim, int n, std::uint64_t seed) {
  switch (rand) {
    case Randomization::owen: return scramble_owen(sobol_base, seed);
    case Randomization::digital_shift: return digital_shift(sobol_base, seed);
    case Randomization::iid: return generate_iid(dim, n, seed);
  }
  throw std::logic_error("unreachable");
}

void check_lp_monotone(const CellResult& cell) {
  double prev_p = 0.0, prev_lp = -1.0;
  for (const auto& [p, lp] : cell.lp) {
    if (prev_lp >= 0.0 && lp < prev_lp * (1.0 - 1e-12))
      throw std::logic_error("L_p monotonicity violated between p=" + std::to_string(prev_p) +
                             " and p=" + std::to_string(p));
    prev_p = p;
    prev_lp = lp;
  }
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

LpErrorReport run_experiment(const ExperimentConfig& cfg, int threads) {
  cfg.validate();

  std::shared_ptr<LogisticSpec> logistic;
  std::optional<LaplaceFit> fit;
  if (cfg.model == ModelKind::logistic) {
    logistic = std::make_shared<LogisticSpec>(load_pima(cfg.pima_path));
    fit = laplace_fit(*logistic);
  }
  const ModelFunctions model = make_model(cfg, fit, logistic);

  LpErrorReport report;
  report.model = cfg.model_name();
  report.cfg = cfg;

  for (ProposalKind kind : cfg.proposals) {
    const Proposal proposal = resolve_proposal(cfg, kind, fit);
    const std::uint64_t proposal_key = derive_key(cfg.master_seed, mix64(static_cast<std::uint64_t>(kind)));

    for (int n : cfg.Ns) {
      const PointSet sobol_base = generate_sobol(model.dim, n);
      const std::uint64_t cell_key = derive_key(proposal_key, static_cast<std::uint64_t>(n));

      CellResult cell;
      cell.proposal = kind;
      cell.n = n;
      cell.estimates.resize(cfg.R);
      std::vector<double> ess_values(cfg.R);
      std::vector<std::string> failures(cfg.R);

      auto run_replicate = [&](int r) {
        try {
          const std::uint64_t rep_seed = derive_key(cell_key, static_cast<std::uint64_t>(r));
          const PointSet pts = make_points(cfg.randomization, sobol_base, model.dim, n, rep_seed);
          const WeightedSample ws =
              make_weighted_sample(pts, proposal.map, model.log_target, proposal.log_density, model.f);
          const EstimateResult est = snis_estimate(ws);
          cell.estimates[r] = est.value;
          ess_values[r] = est.ess;
        } catch (const std::exception& e) {
          failures[r] = e.what();
        }
      };

      const int nthreads = std::max(1, std::min(threads, cfg.R));
      if (nthreads == 1) {
        for (int r = 0; r < cfg.R; ++r) run_replicate(r);
      } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) {
          pool.emplace_back([&, t] {
            for (int r = t; r < cfg.R; r += nthreads) run_replicate(r);
          });
        }
        for (auto& th : pool) th.join();
      }
      for (int r = 0; r < cfg.R; ++r) {
        if (!failures[r].empty()) {
          throw EvaluationError("replicate failure [" + report.model + ", " + to_string(kind) + ", N=" +
                                std::to_string(n) + ", r=" + std::to_string(r) + "]: " + failures[r]);
        }
      }

      cell.mean_estimate = pairwise_sum(cell.estimates) / cfg.R;
      cell.ess_mean = pairwise_sum(ess_values) / cfg.R;
      for (double p : cfg.ps) {
        std::vector<double> dev(cfg.R);
        for (int r = 0; r < cfg.R; ++r) dev[r] = std::pow(std::fabs(cell.estimates[r] - cell.mean_estimate), p);
        cell.lp[p] = std::pow(pairwise_sum(dev) / cfg.R, 1.0 / p);
      }
      check_lp_monotone(cell);
      report.cells.push_back(std::move(cell));
    }
  }

  if (cfg.Ns.size() >= 3) {
    for (ProposalKind kind : cfg.proposals) {
      for (double p : cfg.ps) {
        std::vector<double> log2n, log2err;
        for (int n : cfg.Ns) {
          const auto& cell = report.cell(kind, n);
          log2n.push_back(std::log2(static_cast<double>(n)));
          log2err.push_back(std::log2(cell.lp.at(p)));
        }
        report.rates[{kind, p}] = fit_rate(log2n, log2err);
      }
    }
  }
  return report;
}

RateFit fit_rate(const std::vector<double>& log2n, const std::vector<double>& log2err) {
  const std::size_t m = log2n.size();
  if (m < 3 || log2err.size() != m) throw std::invalid_argument("fit_rate: need at least 3 points");
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sx += log2n[i];
    sy += log2err[i];
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (log2n[i] - mx) * (log2n[i] - mx);
    sxy += (log2n[i] - mx) * (log2err[i] - my);
  }
  RateFit fitres;
  fitres.slope = sxy / sxx;
  fitres.intercept = my - fitres.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double e = log2err[i] - (fitres.intercept + fitres.slope * log2n[i]);
    ss += e * e;
  }
  fitres.residual = std::sqrt(ss / m);
  return fitres;
}

namespace {

struct Series {
  std::string label;
  std::vector<double> x, y;
};

void write_svg_loglog(const std::string& path, const std::string& title, const std::vector<Series>& series) {
  static const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};
  const int width = 640, height = 480, ml = 70, mr = 20, mt = 40, mb = 50;

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series) {
    for (double v : s.x) { xmin = std::min(xmin, v); xmax = std::max(xmax, v); }
    for (double v : s.y) { ymin = std::min(ymin, v); ymax = std::max(ymax, v); }
  }
  if (series.empty() || xmin > xmax) { xmin = 0; xmax = 1; ymin = 0; ymax = 1; }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr); };
  auto py = [&](double y) { return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb); };

  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height << "'>\n";
  os << "<rect width='100%' height='100%' fill='white'/>\n";
  os << "<text x='" << width / 2 << "' y='20' text-anchor='middle' font-size='14'>" << title << "</text>\n";
  // axes
  os << "<line x1='" << ml << "' y1='" << height - mb << "' x2='" << width - mr << "' y2='" << height - mb
     << "' stroke='black'/>\n";
  os << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << height - mb << "' stroke='black'/>\n";
  os << "<text x='" << (ml + width - mr) / 2 << "' y='" << height - 12
     << "' text-anchor='middle' font-size='12'>log2 N</text>\n";
  os << "<text x='16' y='" << (mt + height - mb) / 2 << "' font-size='12' transform='rotate(-90 16 "
     << (mt + height - mb) / 2 << ")'>log2 Lp</text>\n";
  // x ticks at integers
  for (int t = static_cast<int>(std::ceil(xmin)); t <= static_cast<int>(std::floor(xmax)); ++t) {
    os << "<line x1='" << px(t) << "' y1='" << height - mb << "' x2='" << px(t) << "' y2='" << height - mb + 4
       << "' stroke='black'/><text x='" << px(t) << "' y='" << height - mb + 16
       << "' text-anchor='middle' font-size='10'>" << t << "</text>\n";
  }
  for (int t = static_cast<int>(std::ceil(ymin)); t <= static_cast<int>(std::floor(ymax)); ++t) {
    os << "<line x1='" << ml - 4 << "' y1='" << py(t) << "' x2='" << ml << "' y2='" << py(t)
       << "' stroke='black'/><text x='" << ml - 8 << "' y='" << py(t) + 3
       << "' text-anchor='end' font-size='10'>" << t << "</text>\n";
  }
  int ci = 0;
  for (const auto& s : series) {
    const char* color = kColors[ci % 6];
    os << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
    for (std::size_t i = 0; i < s.x.size(); ++i) os << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
    os << "'/>\n";
    for (std::size_t i = 0; i < s.x.size(); ++i)
      os << "<circle cx='" << px(s.x[i]) << "' cy='" << py(s.y[i]) << "' r='3' fill='" << color << "'/>\n";
    os << "<text x='" << width - mr - 120 << "' y='" << mt + 14 * (ci + 1) << "' font-size='11' fill='" << color
       << "'>" << s.label << "</text>\n";
    ++ci;
  }
  os << "</svg>\n";
}

}  // namespace

void emit_report(const LpErrorReport& report, const std::string& output_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(output_dir);
  const fs::path dir(output_dir);

  {
    std::ofstream os(dir / "errors.csv");
    if (!os) throw std::runtime_error("cannot write " + (dir / "errors.csv").string());
    os << "model,proposal,N,p,Lp,mean_estimate,ess_mean,R,seed\n";
    for (const auto& cell : report.cells) {
      for (const auto& [p, lp] : cell.lp) {
        os << report.model << ',' << to_string(cell.proposal) << ',' << cell.n << ',' << format_double(p) << ','
           << format_double(lp) << ',' << format_double(cell.mean_estimate) << ','
           << format_double(cell.ess_mean) << ',' << report.cfg.R << ',' << report.cfg.master_seed << '\n';
      }
    }
  }
  {
    std::ofstream os(dir / "rates.csv");
    if (!os) throw std::runtime_error("cannot write " + (dir / "rates.csv").string());
    os << "proposal,p,slope,intercept,residual\n";
    for (const auto& [key, fitres] : report.rates) {
      os << to_string(key.first) << ',' << format_double(key.second) << ',' << format_double(fitres.slope) << ','
         << format_double(fitres.intercept) << ',' << format_double(fitres.residual) << '\n';
    }
  }
  {
    std::ofstream os(dir / "config.json");
    os << report.cfg.to_json().dump(2) << '\n';
  }
  {
    std::ofstream os(dir / "plot.gp");
    os << "# gnuplot alternative to the emitted SVGs\n"
       << "set datafile separator ','\n"
       << "set logscale xy 2\nset xlabel 'N'\nset ylabel 'Lp'\n"
       << "# plot 'errors.csv' filtering by proposal and p as needed, e.g.:\n"
       << "# plot '< awk -F, \"$2==\\\"tIS\\\" && $4==2\" errors.csv' using 3:5 with linespoints\n";
  }
  for (double p : report.cfg.ps) {
    std::vector<Series> series;
    for (ProposalKind kind : report.cfg.proposals) {
      Series s;
      s.label = to_string(kind);
      for (const auto& cell : report.cells) {
        if (cell.proposal != kind) continue;
        s.x.push_back(std::log2(static_cast<double>(cell.n)));
        s.y.push_back(std::log2(cell.lp.at(p)));
      }
      series.push_back(std::move(s));
    }
    std::ostringstream name;
    name << "lp_" << report.model << "_p" << p << ".svg";
    write_svg_loglog((dir / name.str()).string(), report.model + "  p=" + format_double(p), series);
  }
}

std::vector<ErrorsCsvRow> read_errors_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::vector<ErrorsCsvRow> rows;
  std::string line;
  std::getline(f, line);  // header
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    ErrorsCsvRow row;
    std::string cell;
    std::getline(ls, row.model, ',');
    std::getline(ls, row.proposal, ',');
    std::getline(ls, cell, ',');
    row.n = std::stoi(cell);
    std::getline(ls, cell, ',');
    row.p = std::stod(cell);
    std::getline(ls, cell, ',');
    row.lp = std::stod(cell);
    std::getline(ls, cell, ',');
    row.mean_estimate = std::stod(cell);
    std::getline(ls, cell, ',');
    row.ess_mean = std::stod(cell);
    std::getline(ls, cell, ',');
    row.r = std::stoi(cell);
    std::getline(ls, cell, ',');
    row.seed = std::stoull(cell);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace rqmc
