#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gdss/dof.hpp"
#include "gdss/gibbs.hpp"
#include "gdss/nng.hpp"

namespace gdss {

enum class Criterion { kBIC, kAIC, kAICc, kMMLu };
enum class DofSource { kYL, kPE };
enum class Heuristic { kVarExp, kExcErr };

std::string to_string(Criterion c);
std::string to_string(DofSource d);
std::string to_string(Heuristic h);
Criterion parse_criterion(const std::string& name);
DofSource parse_dof_source(const std::string& name);

/// Coefficient of the sigma_bar^2 / sigma^2 term of the KL divergence.
/// kAnalytic uses n (the divergence between the two Gaussians); kPrinted uses
/// n^2 and exists only for auditing against the printed expression.
enum class KlCoefficient { kAnalytic, kPrinted };

/// KL divergence from N(X beta_bar, sigma2_bar I) to a candidate N(., sigma2 I)
/// whose fitted values differ from the reference by `sse` in squared norm.
double kl_divergence_sse(Index n, double sigma2_bar, double sigma2, double sse,
                         KlCoefficient coef = KlCoefficient::kAnalytic);

double kl_divergence(const Eigen::VectorXd& beta_bar, double sigma2_bar, const Eigen::VectorXd& beta_kappa,
                     double sigma2, const Eigen::MatrixXd& X, KlCoefficient coef = KlCoefficient::kAnalytic);

/// sigma_hat^2 = sse / (n - d) + sigma2_bar; nullopt when d >= n.
std::optional<double> profile_sigma2(double sse, Index n, double d, double sigma2_bar);

/// Complexity penalty; nullopt when the candidate is inadmissible (AICc with n - k - 1 <= 0).
/// y_norm2 is the squared norm of the original centred response.
std::optional<double> penalty(Criterion c, double k, Index n, double sigma2, double y_norm2);

struct ModelScore {
  std::size_t candidate = 0;  // index into the path
  double kappa = 0.0;
  std::vector<Index> support;
  double k = 0.0;
  double sigma2_hat = 0.0;
  double kl = 0.0;
  double penalty = 0.0;
  double total = 0.0;
};

struct ScoringInputs {
  Index n = 0;
  double sigma2_bar = 0.0;
  double y_norm2 = 0.0;
  std::optional<GroupDofTable> df_table;  // required for DofSource::kPE
  KlCoefficient kl = KlCoefficient::kAnalytic;
};

/// Score every admissible candidate; inadmissible ones are left out.
std::vector<ModelScore> score_path(const NngPath& path, const ScoringInputs& inputs, Criterion c, DofSource df);

/// Minimum total; ties go to the smaller support, then the larger kappa.
/// Throws SelectionError when `scores` is empty.
const ModelScore& select_best(const std::vector<ModelScore>& scores);

/// Per-draw variation explained by X beta_kappa.
Eigen::VectorXd variation_explained(const PosteriorDraws& draws, const Eigen::VectorXd& beta_kappa,
                                    const Eigen::MatrixXd& X);
/// Per-draw excess error of X beta_kappa.
Eigen::VectorXd excess_error(const PosteriorDraws& draws, const Eigen::VectorXd& beta_kappa,
                             const Eigen::MatrixXd& X);

/// Linear-interpolation empirical quantile, prob in [0, 1].
double empirical_quantile(Eigen::VectorXd values, double prob);

struct HeuristicChoice {
  std::size_t candidate = 0;
  double reference = 0.0;  // posterior mean of the statistic at beta_kappa = beta_bar
  bool fallback = false;   // no candidate qualified; the kappa = 0 model was returned
};

/// Smallest candidate whose equal-tailed credible interval for the statistic
/// contains the reference expectation.
HeuristicChoice select_heuristic(const NngPath& path, const PosteriorDraws& draws, const Eigen::MatrixXd& X,
                                 Heuristic statistic, double level = 0.90);

}  // namespace gdss
