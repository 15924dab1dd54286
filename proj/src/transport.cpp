#include "rqmc/transport.hpp"

#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

namespace rqmc {

double nonlinear_eval(NonlinearKind kind, double y) {
  switch (kind) {
    case NonlinearKind::sigmoid: return 1.0 / (1.0 + std::exp(-y));
    case NonlinearKind::softplus: return y > 30.0 ? y : std::log1p(std::exp(y));
    case NonlinearKind::tanh: return std::tanh(y);
    case NonlinearKind::swish: return y / (1.0 + std::exp(-y));
  }
  throw std::invalid_argument("nonlinear_eval: unknown kind");
}

NonlinearGrowth nonlinear_growth(NonlinearKind kind) {
  switch (kind) {
    case NonlinearKind::sigmoid:
    case NonlinearKind::softplus: return {0.0, 0.0};
    case NonlinearKind::tanh:
    case NonlinearKind::swish: return {1.0, 0.0};
  }
  throw std::invalid_argument("nonlinear_growth: unknown kind");
}

namespace {

int stage_dim(const Stage& s) {
  if (const auto* inv = std::get_if<InverseCdfStage>(&s)) return static_cast<int>(inv->components.size());
  if (const auto* aff = std::get_if<AffineStage>(&s)) return static_cast<int>(aff->mu.size());
  return static_cast<int>(std::get<NonlinearStage>(s).kinds.size());
}

const char* kind_name(NonlinearKind k) {
  switch (k) {
    case NonlinearKind::sigmoid: return "sigmoid";
    case NonlinearKind::softplus: return "softplus";
    case NonlinearKind::tanh: return "tanh";
    case NonlinearKind::swish: return "swish";
  }
  return "?";
}

NonlinearKind kind_from_name(const std::string& s) {
  if (s == "sigmoid") return NonlinearKind::sigmoid;
  if (s == "softplus") return NonlinearKind::softplus;
  if (s == "tanh") return NonlinearKind::tanh;
  if (s == "swish") return NonlinearKind::swish;
  throw std::invalid_argument("unknown nonlinear kind: " + s);
}

}  // namespace

TransportMap::TransportMap(std::vector<Stage> stages) : stages_(std::move(stages)) {
  if (stages_.empty()) throw std::invalid_argument("TransportMap: at least one stage required");
  if (!std::holds_alternative<InverseCdfStage>(stages_.front()))
    throw std::invalid_argument("TransportMap: first stage must be a component-wise inverse CDF");
  dim_ = stage_dim(stages_.front());
  for (const auto& s : stages_) {
    if (stage_dim(s) != dim_) throw std::invalid_argument("TransportMap: stage dimension mismatch");
    if (std::holds_alternative<InverseCdfStage>(s) && &s != &stages_.front())
      throw std::invalid_argument("TransportMap: inverse CDF allowed only as the first stage");
    if (const auto* aff = std::get_if<AffineStage>(&s)) {
      if (aff->L.rows() != dim_ || aff->L.cols() != dim_)
        throw std::invalid_argument("TransportMap: affine matrix must be d x d");
      for (int i = 0; i < dim_; ++i) {
        if (!(aff->L(i, i) > 0.0))
          throw std::invalid_argument("TransportMap: affine L must have strictly positive diagonal");
        for (int j = i + 1; j < dim_; ++j) {
          if (aff->L(i, j) != 0.0) throw std::invalid_argument("TransportMap: affine L must be lower-triangular");
        }
      }
    }
  }
}

Eigen::VectorXd TransportMap::forward(const Eigen::VectorXd& u) const {
  if (u.size() != dim_) throw std::invalid_argument("map_forward: dimension mismatch");
  Eigen::VectorXd x(dim_);
  const auto& inv = std::get<InverseCdfStage>(stages_.front());
  for (int j = 0; j < dim_; ++j) {
    if (!(u[j] > 0.0 && u[j] < 1.0)) throw std::domain_error("map_forward: input must lie strictly inside the cube");
    const auto& c = inv.components[j];
    x[j] = c.dist == BaseDist::normal ? normal_inv_cdf(u[j]) : student_t_inv_cdf(u[j], c.nu);
  }
  for (std::size_t s = 1; s < stages_.size(); ++s) {
    if (const auto* aff = std::get_if<AffineStage>(&stages_[s])) {
      x = (aff->L * x + aff->mu).eval();
    } else {
      const auto& nl = std::get<NonlinearStage>(stages_[s]);
      for (int j = 0; j < dim_; ++j) x[j] = nonlinear_eval(nl.kinds[j], x[j]);
    }
  }
  return x;
}

nlohmann::json TransportMap::to_json() const {
  nlohmann::json stages = nlohmann::json::array();
  for (const auto& s : stages_) {
    nlohmann::json js;
    if (const auto* inv = std::get_if<InverseCdfStage>(&s)) {
      js["type"] = "inverse_cdf";
      auto dists = nlohmann::json::array();
      for (const auto& c : inv->components) {
        if (c.dist == BaseDist::normal) {
          dists.push_back({{"dist", "normal"}});
        } else {
          dists.push_back({{"dist", "student_t"}, {"nu", c.nu}});
        }
      }
      js["components"] = std::move(dists);
    } else if (const auto* aff = std::get_if<AffineStage>(&s)) {
      js["type"] = "affine";
      std::vector<double> l(aff->L.data(), aff->L.data() + aff->L.size());
      // row-major for readability
      std::vector<double> lr;
      lr.reserve(l.size());
      for (int i = 0; i < aff->L.rows(); ++i)
        for (int j = 0; j < aff->L.cols(); ++j) lr.push_back(aff->L(i, j));
      js["L"] = lr;
      js["mu"] = std::vector<double>(aff->mu.data(), aff->mu.data() + aff->mu.size());
    } else {
      const auto& nl = std::get<NonlinearStage>(s);
      js["type"] = "nonlinear";
      auto kinds = nlohmann::json::array();
      for (auto k : nl.kinds) kinds.push_back(kind_name(k));
      js["kinds"] = std::move(kinds);
    }
    stages.push_back(std::move(js));
  }
  return {{"dim", dim_}, {"stages", std::move(stages)}};
}

TransportMap TransportMap::from_json(const nlohmann::json& j) {
  const int d = j.at("dim").get<int>();
  std::vector<Stage> stages;
  for (const auto& js : j.at("stages")) {
    const std::string type = js.at("type").get<std::string>();
    if (type == "inverse_cdf") {
      InverseCdfStage inv;
      for (const auto& c : js.at("components")) {
        InverseCdfStage::Component comp;
        comp.dist = c.at("dist").get<std::string>() == "normal" ? BaseDist::normal : BaseDist::student_t;
        if (comp.dist == BaseDist::student_t) comp.nu = c.at("nu").get<double>();
        inv.components.push_back(comp);
      }
      stages.emplace_back(std::move(inv));
    } else if (type == "affine") {
      AffineStage aff;
      aff.L = Eigen::MatrixXd(d, d);
      const auto l = js.at("L").get<std::vector<double>>();
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) aff.L(r, c) = l[static_cast<std::size_t>(r) * d + c];
      const auto mu = js.at("mu").get<std::vector<double>>();
      aff.mu = Eigen::Map<const Eigen::VectorXd>(mu.data(), d);
      stages.emplace_back(std::move(aff));
    } else if (type == "nonlinear") {
      NonlinearStage nl;
      for (const auto& k : js.at("kinds")) nl.kinds.push_back(kind_from_name(k.get<std::string>()));
      stages.emplace_back(std::move(nl));
    } else {
      throw std::invalid_argument("TransportMap::from_json: unknown stage type " + type);
    }
  }
  return TransportMap(std::move(stages));
}

GrowthRate compose_growth(GrowthRate m_f, const GrowthProfile& prof, int d, double eps) {
  const double c2 = prof.C_tau * prof.C_tau;
  GrowthRate out;
  out.value = m_f.value * c2 * (1.0 + eps) + d * prof.M_tau;
  out.arbitrarily_small_positive =
      m_f.arbitrarily_small_positive && std::isfinite(c2) && prof.M_tau == 0.0;
  if (out.arbitrarily_small_positive) out.value = 0.0;
  return out;
}

GrowthProfile compose_growth_recursive(const std::vector<StageGrowth>& stages, int d, double eps) {
  if (stages.empty()) throw std::invalid_argument("compose_growth_recursive: at least one stage required");
  const double c_t = stages.front().C_T;
  const double m_t = stages.front().M_T;
  double m_l = 0.0;
  for (const auto& s : stages) {
    if (s.C_T != c_t || s.M_T != m_t)
      throw std::invalid_argument("compose_growth_recursive: stages must share (C_T, M_T)");
    m_l = std::max(m_l, s.M_L);
  }
  const int k_total = static_cast<int>(stages.size());
  const double base = c_t * std::sqrt(m_l);
  double m_tau = 0.0;  // M_tau^{(0)}
  for (int k = 1; k <= k_total; ++k) {
    const double c_star = k == 1 ? 1.0 : std::pow(base, 2 * (k - 1)) * (1.0 + eps);
    m_tau = m_t * m_l * (1.0 + eps) * c_star + d * m_tau;
  }
  GrowthProfile out;
  out.C_tau = std::pow(base, k_total);
  out.M_tau = m_tau;
  return out;
}

TailProfile tail_profile(const TransportMap& map, double eps) {
  const auto& stages = map.stages();
  const auto& inv = std::get<InverseCdfStage>(stages.front());
  const bool gaussian_base = inv.components.front().dist == BaseDist::normal;
  for (const auto& c : inv.components) {
    if ((c.dist == BaseDist::normal) != gaussian_base)
      throw AnalysisError("tail_profile: mixed base distributions are not supported");
  }
  if (!gaussian_base) {
    TailProfile t;
    t.heavy_tailed = true;  // polynomial tail: no alpha, M_q arbitrarily small
    return t;
  }

  Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(map.dim(), map.dim());
  double c_t = 1.0;
  for (std::size_t s = 1; s < stages.size(); ++s) {
    if (const auto* aff = std::get_if<AffineStage>(&stages[s])) {
      if (s != 1) throw AnalysisError("tail_profile: affine stage must directly follow the base inversion");
      sigma = aff->L * aff->L.transpose();
    } else {
      if (s + 1 != stages.size()) throw AnalysisError("tail_profile: nonlinear stage must be trailing");
      const auto& nl = std::get<NonlinearStage>(stages[s]);
      c_t = 0.0;
      for (auto k : nl.kinds) c_t = std::max(c_t, nonlinear_growth(k).C_T);
    }
  }
  TailProfile t;
  t.eta = map.dim() - 2.0;
  if (c_t == 0.0) {
    // Bounded trailing stage: the image is bounded, tails are trivially
    // sub-Gaussian with any rate.
    t.alpha = std::numeric_limits<double>::infinity();
    return t;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
  const double lambda_min_inv = 1.0 / es.eigenvalues().maxCoeff();
  t.alpha = lambda_min_inv / (2.0 * c_t * c_t) - eps;
  return t;
}

std::optional<double> predict_beta(GrowthRate m, double alpha, double p) {
  if (m.arbitrarily_small_positive || m.value <= 0.0) return 1.0;
  if (!(p * m.value < alpha)) return std::nullopt;
  return 1.0 - p * m.value / alpha;
}

}  // namespace rqmc
