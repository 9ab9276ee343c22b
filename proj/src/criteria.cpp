#include "gdss/criteria.hpp"

#include <algorithm>
#include <cmath>

#include "gdss/errors.hpp"

namespace gdss {

std::string to_string(Criterion c) {
  switch (c) {
    case Criterion::kBIC: return "bic";
    case Criterion::kAIC: return "aic";
    case Criterion::kAICc: return "aicc";
    case Criterion::kMMLu: return "mmlu";
  }
  return "unknown";
}

std::string to_string(DofSource d) { return d == DofSource::kYL ? "yl" : "pe"; }

std::string to_string(Heuristic h) { return h == Heuristic::kVarExp ? "varexp" : "excerr"; }

Criterion parse_criterion(const std::string& name) {
  if (name == "bic") return Criterion::kBIC;
  if (name == "aic") return Criterion::kAIC;
  if (name == "aicc") return Criterion::kAICc;
  if (name == "mmlu" || name == "mml") return Criterion::kMMLu;
  throw UsageError("unknown criterion '" + name + "' (expected bic, aic, aicc or mmlu)");
}

DofSource parse_dof_source(const std::string& name) {
  if (name == "yl") return DofSource::kYL;
  if (name == "pe") return DofSource::kPE;
  throw UsageError("unknown df source '" + name + "' (expected yl or pe)");
}

double kl_divergence_sse(Index n, double sigma2_bar, double sigma2, double sse, KlCoefficient coef) {
  const double nn = static_cast<double>(n);
  const double ratio_coef = coef == KlCoefficient::kAnalytic ? nn : nn * nn;
  return 0.5 * nn * std::log(sigma2 / sigma2_bar) - 0.5 * nn + ratio_coef * sigma2_bar / (2.0 * sigma2) +
         sse / (2.0 * sigma2);
}

double kl_divergence(const Eigen::VectorXd& beta_bar, double sigma2_bar, const Eigen::VectorXd& beta_kappa,
                     double sigma2, const Eigen::MatrixXd& X, KlCoefficient coef) {
  if (!(sigma2_bar > 0) || !(sigma2 > 0)) throw UsageError("kl_divergence: variances must be positive");
  const double sse = (X * (beta_kappa - beta_bar)).squaredNorm();
  return kl_divergence_sse(X.rows(), sigma2_bar, sigma2, sse, coef);
}

std::optional<double> profile_sigma2(double sse, Index n, double d, double sigma2_bar) {
  const double denom = static_cast<double>(n) - d;
  if (!(denom > 0)) return std::nullopt;
  return sse / denom + sigma2_bar;
}

std::optional<double> penalty(Criterion c, double k, Index n, double sigma2, double y_norm2) {
  const double nn = static_cast<double>(n);
  switch (c) {
    case Criterion::kBIC: return 0.5 * k * std::log(nn);
    case Criterion::kAIC: return k;
    case Criterion::kAICc: {
      const double denom = nn - k - 1.0;
      if (!(denom > 0)) return std::nullopt;
      return k * nn / denom;
    }
    case Criterion::kMMLu:
      return 0.5 * (k + 1.0) * std::log(y_norm2 / (2.0 * sigma2)) - std::lgamma(0.5 * (k + 3.0)) +
             0.5 * std::log(k + 1.0);
  }
  return std::nullopt;
}

std::vector<ModelScore> score_path(const NngPath& path, const ScoringInputs& in, Criterion c, DofSource df) {
  if (df == DofSource::kPE && !in.df_table) throw UsageError("score_path: df_PE requires a group df table");
  std::vector<ModelScore> scores;
  for (std::size_t i = 0; i < path.candidates.size(); ++i) {
    const NngCandidate& cand = path.candidates[i];
    ModelScore s;
    s.candidate = i;
    s.kappa = cand.kappa;
    s.support = cand.support;
    s.k = df == DofSource::kYL ? dof_yl(cand.d, path.sizes) : dof_pe(cand.support, *in.df_table);
    const double d = c == Criterion::kMMLu ? s.k : 0.0;
    const auto sigma2_hat = profile_sigma2(cand.sse, in.n, d, in.sigma2_bar);
    if (!sigma2_hat) continue;
    const auto pen = penalty(c, s.k, in.n, *sigma2_hat, in.y_norm2);
    if (!pen) continue;
    s.sigma2_hat = *sigma2_hat;
    s.kl = kl_divergence_sse(in.n, in.sigma2_bar, s.sigma2_hat, cand.sse, in.kl);
    s.penalty = *pen;
    s.total = s.kl + s.penalty;
    scores.push_back(std::move(s));
  }
  return scores;
}

const ModelScore& select_best(const std::vector<ModelScore>& scores) {
  if (scores.empty()) throw SelectionError("no admissible candidate model on the path");
  const ModelScore* best = &scores.front();
  for (const auto& s : scores) {
    if (s.total < best->total ||
        (s.total == best->total &&
         (s.support.size() < best->support.size() ||
          (s.support.size() == best->support.size() && s.kappa > best->kappa)))) {
      best = &s;
    }
  }
  return *best;
}

namespace {

// Fitted values X beta for every retained draw, one column per draw.
Eigen::MatrixXd draw_fits(const PosteriorDraws& draws, const Eigen::MatrixXd& X) {
  return X * draws.beta.transpose();
}

Eigen::VectorXd variation_explained_impl(const Eigen::MatrixXd& fits, const Eigen::VectorXd& sigma2,
                                         const Eigen::VectorXd& fit_kappa) {
  const double n = static_cast<double>(fits.rows());
  Eigen::VectorXd out(fits.cols());
  for (Index i = 0; i < fits.cols(); ++i) {
    const double signal = fits.col(i).squaredNorm() / n;
    const double excess = (fits.col(i) - fit_kappa).squaredNorm() / n;
    const double denom = signal + sigma2[i] + excess;
    out[i] = denom > 0 ? signal / denom : 0.0;
  }
  return out;
}

Eigen::VectorXd excess_error_impl(const Eigen::MatrixXd& fits, const Eigen::VectorXd& sigma2,
                                  const Eigen::VectorXd& fit_kappa) {
  const double n = static_cast<double>(fits.rows());
  Eigen::VectorXd out(fits.cols());
  for (Index i = 0; i < fits.cols(); ++i) {
    const double excess = (fits.col(i) - fit_kappa).squaredNorm() / n;
    out[i] = std::sqrt(excess + sigma2[i]) - std::sqrt(sigma2[i]);
  }
  return out;
}

}  // namespace

Eigen::VectorXd variation_explained(const PosteriorDraws& draws, const Eigen::VectorXd& beta_kappa,
                                    const Eigen::MatrixXd& X) {
  if (draws.size() == 0) throw UsageError("variation_explained: no draws");
  return variation_explained_impl(draw_fits(draws, X), draws.sigma2, X * beta_kappa);
}

Eigen::VectorXd excess_error(const PosteriorDraws& draws, const Eigen::VectorXd& beta_kappa,
                             const Eigen::MatrixXd& X) {
  if (draws.size() == 0) throw UsageError("excess_error: no draws");
  return excess_error_impl(draw_fits(draws, X), draws.sigma2, X * beta_kappa);
}

double empirical_quantile(Eigen::VectorXd values, double prob) {
  if (values.size() == 0) throw UsageError("empirical_quantile: no values");
  std::sort(values.begin(), values.end());
  const double pos = prob * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<Index>(std::floor(pos));
  const Index hi = std::min<Index>(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

HeuristicChoice select_heuristic(const NngPath& path, const PosteriorDraws& draws, const Eigen::MatrixXd& X,
                                 Heuristic statistic, double level) {
  if (path.candidates.empty()) throw UsageError("select_heuristic: empty path");
  if (draws.size() == 0) throw UsageError("select_heuristic: no draws");
  if (!(level > 0 && level < 1)) throw UsageError("select_heuristic: level must lie in (0, 1)");

  const Eigen::MatrixXd fits = draw_fits(draws, X);
  auto stat = [&](const Eigen::VectorXd& fit_kappa) {
    return statistic == Heuristic::kVarExp ? variation_explained_impl(fits, draws.sigma2, fit_kappa)
                                           : excess_error_impl(fits, draws.sigma2, fit_kappa);
  };
  const Eigen::VectorXd beta_bar = draws.beta.colwise().mean().transpose();

  HeuristicChoice choice;
  choice.reference = stat(X * beta_bar).mean();

  std::vector<std::size_t> order(path.candidates.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return path.candidates[a].support.size() < path.candidates[b].support.size();
  });

  const double tail = 0.5 * (1.0 - level);
  for (std::size_t i : order) {
    const auto& cand = path.candidates[i];
    if (cand.beta_kappa.size() != X.cols()) throw UsageError("select_heuristic: path lacks beta_kappa");
    const Eigen::VectorXd values = stat(X * cand.beta_kappa);
    const double lo = empirical_quantile(values, tail);
    const double hi = empirical_quantile(values, 1.0 - tail);
    if (lo <= choice.reference && choice.reference <= hi) {
      choice.candidate = i;
      return choice;
    }
  }
  choice.candidate = path.candidates.size() - 1;
  choice.fallback = true;
  return choice;
}

}  // namespace gdss
