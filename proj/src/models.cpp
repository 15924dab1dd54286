#include "rqmc/models.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace rqmc {

namespace {
constexpr double kLog2Pi = 1.8378770664093453;
}

InverseProblemSpec InverseProblemSpec::make(int d, double n, double kappa) {
  // n = 0 switches the likelihood off, leaving the prior; still valid.
  if (d < 1 || !(n >= 0.0) || !(kappa > 0.0)) throw std::invalid_argument("InverseProblemSpec: invalid parameters");
  InverseProblemSpec s;
  s.d = d;
  s.n = n;
  s.kappa = kappa;
  s.lambda = 1.0 / std::sqrt(kappa) - 1.0;
  s.prior_mu = Eigen::VectorXd::Ones(d);
  s.prior_sigma = Eigen::MatrixXd::Identity(d, d);
  return s;
}

double inverse_problem_psi(const Eigen::VectorXd& z, const InverseProblemSpec& spec) {
  double acc = 0.0;
  for (int i = 0; i < spec.d; ++i) {
    const double zi = z[i];
    const double g = 1.0 + spec.lambda * std::exp(-zi * zi);
    acc += zi * zi * g * g;
  }
  return 0.5 * acc;
}

double inverse_problem_log_unnorm_target(const Eigen::VectorXd& z, const InverseProblemSpec& spec) {
  const double log_prior = -0.5 * spec.d * kLog2Pi - 0.5 * (z - spec.prior_mu).squaredNorm();
  return -spec.n * inverse_problem_psi(z, spec) + log_prior;
}

std::string to_string(ProposalKind k) {
  switch (k) {
    case ProposalKind::PriorIS: return "PriorIS";
    case ProposalKind::ODIS: return "ODIS";
    case ProposalKind::LapIS: return "LapIS";
    case ProposalKind::tIS0: return "tIS0";
    case ProposalKind::tIS: return "tIS";
    case ProposalKind::custom: return "custom";
  }
  return "?";
}

ProposalKind proposal_kind_from_string(const std::string& s) {
  if (s == "PriorIS") return ProposalKind::PriorIS;
  if (s == "ODIS") return ProposalKind::ODIS;
  if (s == "LapIS") return ProposalKind::LapIS;
  if (s == "tIS0") return ProposalKind::tIS0;
  if (s == "tIS") return ProposalKind::tIS;
  if (s == "custom") return ProposalKind::custom;
  throw std::invalid_argument("unknown proposal kind: " + s);
}

ProposalSpec build_proposal(ProposalKind kind, const InverseProblemSpec& spec) {
  const int d = spec.d;
  ProposalSpec p;
  p.kind = kind;
  switch (kind) {
    case ProposalKind::PriorIS:
      p.mu = Eigen::VectorXd::Ones(d);
      p.sigma = Eigen::MatrixXd::Identity(d, d);
      break;
    case ProposalKind::ODIS:
      p.mu = Eigen::VectorXd::Zero(d);
      p.sigma = Eigen::MatrixXd::Identity(d, d);
      break;
    case ProposalKind::LapIS:
      p.mu = Eigen::VectorXd::Zero(d);
      p.sigma = (spec.kappa / spec.n) * Eigen::MatrixXd::Identity(d, d);
      break;
    case ProposalKind::tIS0:
      p.mu = Eigen::VectorXd::Ones(d);
      p.sigma = Eigen::MatrixXd::Identity(d, d);
      p.nu = 5.0;
      break;
    case ProposalKind::tIS:
      p.mu = Eigen::VectorXd::Zero(d);
      p.sigma = (spec.kappa / spec.n) * Eigen::MatrixXd::Identity(d, d);
      p.nu = 5.0;
      break;
    default:
      throw std::invalid_argument("build_proposal: unknown kind");
  }
  return p;
}

Proposal make_proposal(const ProposalSpec& spec) {
  const int d = static_cast<int>(spec.mu.size());
  Eigen::LLT<Eigen::MatrixXd> llt(spec.sigma);
  if (llt.info() != Eigen::Success) throw std::invalid_argument("make_proposal: sigma must be positive definite");
  const Eigen::MatrixXd l = llt.matrixL();

  InverseCdfStage inv;
  inv.components.resize(d);
  for (auto& c : inv.components) {
    if (spec.nu) {
      c.dist = BaseDist::student_t;
      c.nu = *spec.nu;
    } else {
      c.dist = BaseDist::normal;
    }
  }
  AffineStage aff{l, spec.mu};
  TransportMap map({Stage{std::move(inv)}, Stage{std::move(aff)}});

  double log_det_l = 0.0;
  for (int i = 0; i < d; ++i) log_det_l += std::log(l(i, i));

  std::function<double(const Eigen::VectorXd&)> logq;
  if (spec.nu) {
    const double nu = *spec.nu;
    logq = [l, mu = spec.mu, log_det_l, nu](const Eigen::VectorXd& x) {
      const Eigen::VectorXd y = l.triangularView<Eigen::Lower>().solve(x - mu);
      double acc = -log_det_l;
      for (int i = 0; i < y.size(); ++i) acc += student_t_log_pdf(y[i], nu);
      return acc;
    };
  } else {
    logq = [l, mu = spec.mu, log_det_l, d](const Eigen::VectorXd& x) {
      const Eigen::VectorXd y = l.triangularView<Eigen::Lower>().solve(x - mu);
      return -0.5 * d * kLog2Pi - log_det_l - 0.5 * y.squaredNorm();
    };
  }
  return Proposal{spec, std::move(map), std::move(logq)};
}

double logistic_log_likelihood(const Eigen::VectorXd& beta, const LogisticSpec& spec) {
  if (beta.size() != spec.X.cols()) throw std::invalid_argument("logistic_log_likelihood: dimension mismatch");
  const Eigen::VectorXd eta = spec.X * beta;
  double acc = beta.dot(spec.X.transpose() * spec.Y);
  for (int i = 0; i < eta.size(); ++i) {
    const double e = eta[i];
    // log(1 + exp(e)) without overflow
    acc -= e > 0.0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e));
  }
  return acc;
}

double logistic_log_unnorm_posterior(const Eigen::VectorXd& beta, const LogisticSpec& spec) {
  const double log_prior = -0.5 * beta.size() * kLog2Pi - 0.5 * beta.squaredNorm();
  return logistic_log_likelihood(beta, spec) + log_prior;
}

LaplaceFit laplace_fit(const LogisticSpec& spec, double tol, int max_iter) {
  const int d = static_cast<int>(spec.X.cols());
  const int m = static_cast<int>(spec.X.rows());
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(d);

  auto gradient = [&](const Eigen::VectorXd& b) {
    Eigen::VectorXd p(m);
    const Eigen::VectorXd eta = spec.X * b;
    for (int i = 0; i < m; ++i) p[i] = 1.0 / (1.0 + std::exp(-eta[i]));
    return Eigen::VectorXd(spec.X.transpose() * (spec.Y - p) - b);
  };
  auto hessian_neg = [&](const Eigen::VectorXd& b) {
    // I + X^T W X with W = diag(p_i (1 - p_i)); always SPD.
    const Eigen::VectorXd eta = spec.X * b;
    Eigen::VectorXd w(m);
    for (int i = 0; i < m; ++i) {
      const double p = 1.0 / (1.0 + std::exp(-eta[i]));
      w[i] = p * (1.0 - p);
    }
    return Eigen::MatrixXd(Eigen::MatrixXd::Identity(d, d) +
                           spec.X.transpose() * w.asDiagonal() * spec.X);
  };

  Eigen::VectorXd g = gradient(beta);
  int it = 0;
  for (; it < max_iter && g.norm() > tol; ++it) {
    const Eigen::MatrixXd h = hessian_neg(beta);
    const Eigen::VectorXd step = h.llt().solve(g);
    double scale = 1.0;
    Eigen::VectorXd next = beta + step;
    Eigen::VectorXd gn = gradient(next);
    for (int halving = 0; halving < 30 && gn.norm() >= g.norm(); ++halving) {
      scale *= 0.5;
      next = beta + scale * step;
      gn = gradient(next);
    }
    beta = next;
    g = gn;
  }
  if (g.norm() > tol) {
    throw FitError("laplace_fit: no convergence after " + std::to_string(max_iter) +
                   " iterations, gradient norm " + std::to_string(g.norm()));
  }
  LaplaceFit fit;
  fit.mu_star = beta;
  fit.sigma_star = hessian_neg(beta).llt().solve(Eigen::MatrixXd::Identity(d, d));
  // enforce exact symmetry against round-off
  fit.sigma_star = 0.5 * (fit.sigma_star + fit.sigma_star.transpose()).eval();
  fit.iterations = it;
  return fit;
}

LogisticSpec load_pima(const std::string& path) {
  constexpr int kRows = 392, kPredictors = 8;
  std::ifstream f(path);
  if (!f) throw IngestionError("load_pima: cannot open " + path);
  std::string line;
  if (!std::getline(f, line)) throw IngestionError("load_pima: empty file " + path);  // header

  Eigen::MatrixXd raw(kRows, kPredictors);
  Eigen::VectorXd y(kRows);
  int row = 0;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (row >= kRows)
      throw IngestionError("load_pima: expected exactly 392 data rows (8 predictors + label), got more");
    std::istringstream ls(line);
    std::string cell;
    for (int j = 0; j < kPredictors; ++j) {
      if (!std::getline(ls, cell, ','))
        throw IngestionError("load_pima: expected 8 predictor columns + label at row " + std::to_string(row + 1));
      raw(row, j) = std::stod(cell);
    }
    if (!std::getline(ls, cell, ','))
      throw IngestionError("load_pima: missing label at row " + std::to_string(row + 1));
    const double label = std::stod(cell);
    if (label != 0.0 && label != 1.0)
      throw IngestionError("load_pima: label must be 0 or 1 at row " + std::to_string(row + 1));
    y[row] = label;
    ++row;
  }
  if (row != kRows)
    throw IngestionError("load_pima: expected exactly 392 data rows (8 predictors + label), got " +
                         std::to_string(row));

  // Standardize predictors, prepend intercept.
  LogisticSpec spec;
  spec.X.resize(kRows, kPredictors + 1);
  spec.X.col(0).setOnes();
  for (int j = 0; j < kPredictors; ++j) {
    const double mean = raw.col(j).mean();
    const double sd = std::sqrt((raw.col(j).array() - mean).square().sum() / (kRows - 1));
    if (!(sd > 0.0)) throw IngestionError("load_pima: constant predictor column " + std::to_string(j + 1));
    spec.X.col(j + 1) = (raw.col(j).array() - mean) / sd;
  }
  spec.Y = y;
  return spec;
}

double conjugate_reference(const InverseProblemSpec& spec) {
  if (spec.lambda != 0.0)
    throw std::invalid_argument("conjugate_reference: only applicable for lambda = 0 (kappa = 1)");
  const double v = 1.0 / (spec.n + 1.0);
  return spec.d * (v + v * v);
}

}  // namespace rqmc
