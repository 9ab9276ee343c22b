#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gdss/groups.hpp"
#include "gdss/random.hpp"

namespace gdss {

enum class PriorKind { kGroupLasso, kGroupHorseshoe, kGroupHorseshoePlus };

std::string to_string(PriorKind prior);
/// Accepts "lasso", "horseshoe", "horseshoe+" / "horseshoeplus".
PriorKind parse_prior(const std::string& name);

/// Floor applied to the Gaussian data term of the lambda and delta updates.
inline constexpr double kDataTermFloor = 1e-30;

/// Inverse-gamma prior on the noise variance. Zero shape and scale give the
/// improper 1/sigma2 prior the sampler uses by default.
struct NoisePrior {
  double shape = 0.0;
  double scale = 0.0;
};

/// Full state of one Gibbs iteration, including all auxiliary variables.
struct ChainState {
  Eigen::VectorXd beta;
  double sigma2 = 1.0;
  double tau2 = 1.0;
  double nu = 1.0;
  Eigen::VectorXd lambda2;
  Eigen::VectorXd c;     // horseshoe and horseshoe+
  Eigen::VectorXd phi2;  // horseshoe+
  Eigen::VectorXd eta;   // horseshoe+
  std::vector<Eigen::VectorXd> delta2;
  std::vector<Eigen::VectorXd> t;    // horseshoe: t; horseshoe+: t^2
  std::vector<Eigen::VectorXd> xi;   // horseshoe+
  std::vector<Eigen::VectorXd> psi;  // horseshoe+
  std::size_t guard_events = 0;

  /// beta = 0 and every scale and auxiliary set to one.
  static ChainState initial(const GroupHierarchy& h, double sigma2 = 1.0);
  ShrinkageScales scales() const;
};

/// Design matrix, response and the cross products the sampler reuses.
struct RegressionData {
  RegressionData(Eigen::MatrixXd X, Eigen::VectorXd y);

  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  Eigen::MatrixXd XtX;
  Eigen::VectorXd Xty;

  Index n() const noexcept { return X.rows(); }
  Index p() const noexcept { return X.cols(); }
};

Eigen::VectorXd update_beta(const ChainState& state, const RegressionData& data, const GroupHierarchy& h,
                            RngStream& rng);

double update_sigma2(const ChainState& state, const RegressionData& data, const GroupHierarchy& h,
                     RngStream& rng, const NoisePrior& noise_prior = {});

struct GlobalScale {
  double tau2;
  double nu;
};
/// tau2 given beta and nu, then nu given the new tau2.
GlobalScale update_tau2_nu(const ChainState& state, const GroupHierarchy& h, RngStream& rng);

struct LocalScales {
  Eigen::VectorXd lambda2;
  Eigen::VectorXd c;
  Eigen::VectorXd phi2;
  Eigen::VectorXd eta;
  std::size_t guard_events = 0;
};
LocalScales update_lambdas(const ChainState& state, PriorKind prior, const GroupHierarchy& h, RngStream& rng);

struct GroupScales {
  std::vector<Eigen::VectorXd> delta2;
  std::vector<Eigen::VectorXd> t;
  std::vector<Eigen::VectorXd> xi;
  std::vector<Eigen::VectorXd> psi;
  std::size_t guard_events = 0;
};
/// Levels are updated in order; level k sees the already-updated scales of levels < k.
GroupScales update_deltas(const ChainState& state, PriorKind prior, const GroupHierarchy& h, RngStream& rng);

/// One full sweep: beta, sigma2, (tau2, nu), local block, group blocks.
void gibbs_sweep(ChainState& state, const RegressionData& data, const GroupHierarchy& h, PriorKind prior,
                 RngStream& rng, const NoisePrior& noise_prior = {});

struct SamplerConfig {
  PriorKind prior = PriorKind::kGroupHorseshoe;
  std::size_t iterations = 10000;
  std::size_t burn_in = 1000;
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;
  NoisePrior noise_prior;
};

/// Retained post-burn-in draws. Row i of each matrix is retained draw i.
struct PosteriorDraws {
  Eigen::MatrixXd beta;     // m x p
  Eigen::VectorXd sigma2;   // m
  Eigen::VectorXd tau2;     // m
  Eigen::MatrixXd lambda2;  // m x p
  std::vector<Eigen::MatrixXd> delta2;  // per level, m x G_k
  SamplerConfig config;
  std::size_t guard_events = 0;

  Index size() const noexcept { return beta.rows(); }
  Index num_predictors() const noexcept { return beta.cols(); }
  /// Scales of retained draw i.
  ShrinkageScales scales(Index i) const;
};

/// Run a chain on standardised X and centred y. Throws NumericalError tagged
/// with the iteration index when a conditional cannot be sampled.
PosteriorDraws run_chain(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const GroupHierarchy& h,
                         const SamplerConfig& config);

struct PosteriorSummary {
  Eigen::VectorXd beta_bar;
  double sigma2_bar = 0.0;
  double tau2_bar = 0.0;
  Eigen::VectorXd lambda2_bar;
  std::vector<Eigen::VectorXd> delta2_bar;
};

PosteriorSummary posterior_summary(const PosteriorDraws& draws);

}  // namespace gdss
