#ifndef RQMC_TRANSPORT_HPP
#define RQMC_TRANSPORT_HPP

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rqmc/stats.hpp"

namespace rqmc {

// Slack used by every (1+eps) factor of the growth calculus. The theory
// holds for all eps > 0; a fixed value makes the calculus computable.
inline constexpr double kGrowthEps = 1e-3;

enum class BaseDist { normal, student_t };

enum class NonlinearKind { sigmoid, softplus, tanh, swish };

double nonlinear_eval(NonlinearKind kind, double y);

// Linear-growth constants (C_T, M_T) of a component-wise nonlinear map:
// sigmoid/softplus are bounded (C_T = 0), tanh/swish have unit slope growth.
struct NonlinearGrowth {
  double C_T;
  double M_T;
};
NonlinearGrowth nonlinear_growth(NonlinearKind kind);

// Growth rate M in the bound |D^a f| <= exp(M ||x||^2). The flag models
// "arbitrarily small M > 0": symbolic, never a tiny float.
struct GrowthRate {
  double value = 0.0;
  bool arbitrarily_small_positive = false;
};

struct GrowthProfile {
  double C_tau = 1.0;
  double M_tau = 0.0;
  double alpha = 0.0;  // tail decay: P(||T(u)|| > t) <~ t^eta exp(-alpha t^2)
  double eta = 0.0;
};

struct InverseCdfStage {
  struct Component {
    BaseDist dist = BaseDist::normal;
    double nu = 0.0;  // degrees of freedom, student_t only
  };
  std::vector<Component> components;
};

struct AffineStage {
  Eigen::MatrixXd L;   // lower-triangular with positive diagonal; Sigma = L L^T
  Eigen::VectorXd mu;
};

struct NonlinearStage {
  std::vector<NonlinearKind> kinds;
};

using Stage = std::variant<InverseCdfStage, AffineStage, NonlinearStage>;

struct AnalysisError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Composition of stages mapping (0,1)^d -> R^d. The first stage is always
// a component-wise inverse CDF; later stages map R^d -> R^d.
class TransportMap {
 public:
  explicit TransportMap(std::vector<Stage> stages);

  int dim() const { return dim_; }
  const std::vector<Stage>& stages() const { return stages_; }

  Eigen::VectorXd forward(const Eigen::VectorXd& u) const;

  nlohmann::json to_json() const;
  static TransportMap from_json(const nlohmann::json& j);

 private:
  std::vector<Stage> stages_;
  int dim_;
};

// M_{f,tau} = M_f C_tau^2 (1+eps) + d M_tau. The arbitrarily-small flag
// propagates when the composed value stays arbitrarily small.
GrowthRate compose_growth(GrowthRate m_f, const GrowthProfile& prof, int d, double eps = kGrowthEps);

// K-fold composition tau^K o ... o tau^1 with shared (C_T, M_T) and the
// per-stage affine spectral bound M_L = lambda_max(L^T L).
struct StageGrowth {
  double C_T;
  double M_T;
  double M_L;
};
GrowthProfile compose_growth_recursive(const std::vector<StageGrowth>& stages, int d, double eps = kGrowthEps);

struct TailProfile {
  bool heavy_tailed = false;  // Student-t base: polynomial tail, no alpha
  double alpha = 0.0;
  double eta = 0.0;
};
TailProfile tail_profile(const TransportMap& map, double eps = kGrowthEps);

// beta = 1 - p max{M, 0} / alpha; exactly 1 when M <= 0 or flagged
// arbitrarily small. Empty when p max{M,0} >= alpha (rate theorem does not
// apply).
std::optional<double> predict_beta(GrowthRate m, double alpha, double p);

}  // namespace rqmc

#endif
