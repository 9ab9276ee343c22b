#include "gdss/gibbs.hpp"

#include <cmath>
#include <string>

#include "gdss/errors.hpp"

namespace gdss {

std::string to_string(PriorKind prior) {
  switch (prior) {
    case PriorKind::kGroupLasso: return "lasso";
    case PriorKind::kGroupHorseshoe: return "horseshoe";
    case PriorKind::kGroupHorseshoePlus: return "horseshoe+";
  }
  return "unknown";
}

PriorKind parse_prior(const std::string& name) {
  if (name == "lasso") return PriorKind::kGroupLasso;
  if (name == "horseshoe" || name == "hs") return PriorKind::kGroupHorseshoe;
  if (name == "horseshoe+" || name == "horseshoeplus" || name == "hs+") return PriorKind::kGroupHorseshoePlus;
  throw UsageError("unknown prior '" + name + "' (expected lasso, horseshoe or horseshoe+)");
}

ChainState ChainState::initial(const GroupHierarchy& h, double sigma2) {
  const Index p = h.num_predictors();
  ChainState s;
  s.beta = Eigen::VectorXd::Zero(p);
  s.sigma2 = sigma2;
  s.lambda2 = Eigen::VectorXd::Ones(p);
  s.c = Eigen::VectorXd::Ones(p);
  s.phi2 = Eigen::VectorXd::Ones(p);
  s.eta = Eigen::VectorXd::Ones(p);
  for (const auto& lvl : h.levels()) {
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(lvl.num_groups());
    s.delta2.push_back(ones);
    s.t.push_back(ones);
    s.xi.push_back(ones);
    s.psi.push_back(ones);
  }
  return s;
}

ShrinkageScales ChainState::scales() const { return ShrinkageScales{tau2, lambda2, delta2}; }

RegressionData::RegressionData(Eigen::MatrixXd X_in, Eigen::VectorXd y_in) : X(std::move(X_in)), y(std::move(y_in)) {
  if (X.rows() != y.size()) throw DataError("regression data: X has " + std::to_string(X.rows()) +
                                            " rows but y has " + std::to_string(y.size()) + " entries");
  XtX = X.transpose() * X;
  Xty = X.transpose() * y;
}

namespace {

double floored(double value, std::size_t& guard_events) {
  if (value < kDataTermFloor) {
    ++guard_events;
    return kDataTermFloor;
  }
  return value;
}

}  // namespace

Eigen::VectorXd update_beta(const ChainState& state, const RegressionData& data, const GroupHierarchy& h,
                            RngStream& rng) {
  const Eigen::VectorXd prior_var = scale_diag(h, state.scales());
  Eigen::MatrixXd precision = data.XtX;
  precision.diagonal() += prior_var.cwiseInverse();
  return sample_mvn_precision(data.Xty, precision, state.sigma2, rng);
}

double update_sigma2(const ChainState& state, const RegressionData& data, const GroupHierarchy& h,
                     RngStream& rng, const NoisePrior& noise_prior) {
  const Eigen::VectorXd prior_var = scale_diag(h, state.scales());
  const double rss = (data.y - data.X * state.beta).squaredNorm();
  const double penalty = state.beta.cwiseAbs2().cwiseQuotient(prior_var).sum();
  const double shape = noise_prior.shape + 0.5 * static_cast<double>(data.n() - 1 + data.p());
  const double scale = noise_prior.scale + 0.5 * (rss + penalty);
  return sample_inverse_gamma(shape, scale, rng);
}

GlobalScale update_tau2_nu(const ChainState& state, const GroupHierarchy& h, RngStream& rng) {
  const Eigen::VectorXd local = state.lambda2.cwiseProduct(group_scale_product(h, state.delta2));
  const double quad = state.beta.cwiseAbs2().cwiseQuotient(local).sum();
  const double p = static_cast<double>(h.num_predictors());
  GlobalScale out{};
  out.tau2 = sample_inverse_gamma(0.5 * (p + 1.0), quad / (2.0 * state.sigma2) + 1.0 / state.nu, rng);
  out.nu = sample_inverse_gamma(1.0, 1.0 / out.tau2 + 1.0, rng);
  return out;
}

LocalScales update_lambdas(const ChainState& state, PriorKind prior, const GroupHierarchy& h, RngStream& rng) {
  const Eigen::VectorXd group_prod = group_scale_product(h, state.delta2);
  LocalScales out{state.lambda2, state.c, state.phi2, state.eta, 0};
  const double denom = 2.0 * state.sigma2 * state.tau2;
  for (Index j = 0; j < h.num_predictors(); ++j) {
    // beta_j^2 / (2 sigma2 tau2 [D]_jj): the Gaussian data term shared by all priors.
    const double data_term = floored(state.beta[j] * state.beta[j] / (denom * group_prod[j]), out.guard_events);
    switch (prior) {
      case PriorKind::kGroupLasso: {
        const double inv = sample_inverse_gaussian(std::sqrt(1.0 / data_term), 2.0, rng);
        out.lambda2[j] = 1.0 / inv;
        break;
      }
      case PriorKind::kGroupHorseshoe: {
        out.lambda2[j] = sample_inverse_gamma(1.0, data_term + 1.0 / out.c[j], rng);
        out.c[j] = sample_inverse_gamma(1.0, 1.0 / out.lambda2[j] + 1.0, rng);
        break;
      }
      case PriorKind::kGroupHorseshoePlus: {
        out.lambda2[j] = sample_inverse_gamma(1.0, data_term + 1.0 / out.c[j], rng);
        out.c[j] = sample_inverse_gamma(1.0, 1.0 / out.lambda2[j] + 1.0 / out.phi2[j], rng);
        out.phi2[j] = sample_inverse_gamma(1.0, 1.0 / out.c[j] + 1.0 / out.eta[j], rng);
        out.eta[j] = sample_inverse_gamma(1.0, 1.0 / out.phi2[j] + 1.0, rng);
        break;
      }
    }
  }
  return out;
}

GroupScales update_deltas(const ChainState& state, PriorKind prior, const GroupHierarchy& h, RngStream& rng) {
  GroupScales out{state.delta2, state.t, state.xi, state.psi, 0};
  const double denom = 2.0 * state.sigma2 * state.tau2;
  for (Index k = 0; k < h.num_levels(); ++k) {
    const auto ks = static_cast<std::size_t>(k);
    const Eigen::VectorXd others = scale_diag_excluding(h, out.delta2, k);
    const GroupLevel& lvl = h.level(k);
    auto& delta2 = out.delta2[ks];
    auto& t = out.t[ks];
    auto& xi = out.xi[ks];
    auto& psi = out.psi[ks];
    for (Index g = 0; g < lvl.num_groups(); ++g) {
      double sum = 0.0;
      for (Index i : lvl.members[static_cast<std::size_t>(g)]) {
        sum += state.beta[i] * state.beta[i] / (state.lambda2[i] * others[i]);
      }
      const double data_term = floored(sum / denom, out.guard_events);
      const double size = static_cast<double>(lvl.group_size(g));
      switch (prior) {
        case PriorKind::kGroupLasso:
          // delta^{-2} ~ GIG with x-coefficient alpha and 1/x-coefficient 2,
          // equivalently delta^2 ~ GIG(chi = alpha, psi = 2, order = 1 - s/2).
          delta2[g] = sample_gig(2.0 * data_term, 2.0, 1.0 - 0.5 * size, rng);
          break;
        case PriorKind::kGroupHorseshoe:
          delta2[g] = sample_inverse_gamma(0.5 * (size + 1.0), data_term + 1.0 / t[g], rng);
          t[g] = sample_inverse_gamma(1.0, 1.0 / delta2[g] + 1.0, rng);
          break;
        case PriorKind::kGroupHorseshoePlus:
          // t holds t^2 for this prior.
          delta2[g] = sample_inverse_gamma(0.5 * (size + 1.0), data_term + 1.0 / xi[g], rng);
          xi[g] = sample_inverse_gamma(1.0, 1.0 / delta2[g] + 1.0 / t[g], rng);
          t[g] = sample_inverse_gamma(1.0, 1.0 / xi[g] + 1.0 / psi[g], rng);
          psi[g] = sample_inverse_gamma(1.0, 1.0 / t[g] + 1.0, rng);
          break;
      }
    }
  }
  return out;
}

void gibbs_sweep(ChainState& state, const RegressionData& data, const GroupHierarchy& h, PriorKind prior,
                 RngStream& rng, const NoisePrior& noise_prior) {
  state.beta = update_beta(state, data, h, rng);
  state.sigma2 = update_sigma2(state, data, h, rng, noise_prior);
  const GlobalScale global = update_tau2_nu(state, h, rng);
  state.tau2 = global.tau2;
  state.nu = global.nu;

  LocalScales local = update_lambdas(state, prior, h, rng);
  state.lambda2 = std::move(local.lambda2);
  state.c = std::move(local.c);
  state.phi2 = std::move(local.phi2);
  state.eta = std::move(local.eta);
  state.guard_events += local.guard_events;

  GroupScales groups = update_deltas(state, prior, h, rng);
  state.delta2 = std::move(groups.delta2);
  state.t = std::move(groups.t);
  state.xi = std::move(groups.xi);
  state.psi = std::move(groups.psi);
  state.guard_events += groups.guard_events;
}

ShrinkageScales PosteriorDraws::scales(Index i) const {
  ShrinkageScales s;
  s.tau2 = tau2[i];
  s.lambda2 = lambda2.row(i).transpose();
  for (const auto& d : delta2) s.delta2.push_back(d.row(i).transpose());
  return s;
}

PosteriorDraws run_chain(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const GroupHierarchy& h,
                         const SamplerConfig& config) {
  if (config.iterations <= config.burn_in) throw UsageError("run_chain: iterations must exceed burn-in");
  if (X.cols() != h.num_predictors()) {
    throw DataError("run_chain: X has " + std::to_string(X.cols()) + " columns but the hierarchy has " +
                    std::to_string(h.num_predictors()) + " predictors");
  }
  const RegressionData data(X, y);
  RngStream rng(config.seed, config.stream);

  const double y_var = data.n() > 1 ? y.squaredNorm() / static_cast<double>(data.n() - 1) : 1.0;
  ChainState state = ChainState::initial(h, y_var > 0 ? y_var : 1.0);

  const auto retained = static_cast<Index>(config.iterations - config.burn_in);
  const Index p = h.num_predictors();
  PosteriorDraws draws;
  draws.config = config;
  draws.beta.resize(retained, p);
  draws.sigma2.resize(retained);
  draws.tau2.resize(retained);
  draws.lambda2.resize(retained, p);
  for (const auto& lvl : h.levels()) draws.delta2.emplace_back(retained, lvl.num_groups());

  for (std::size_t it = 0; it < config.iterations; ++it) {
    try {
      gibbs_sweep(state, data, h, config.prior, rng, config.noise_prior);
    } catch (const NumericalError& e) {
      throw NumericalError(std::string(e.what()) + " at iteration " + std::to_string(it));
    } catch (const ParameterDomainError& e) {
      throw NumericalError(std::string("degenerate conditional: ") + e.what() + " at iteration " +
                           std::to_string(it));
    }
    if (it < config.burn_in) continue;
    const auto r = static_cast<Index>(it - config.burn_in);
    draws.beta.row(r) = state.beta.transpose();
    draws.sigma2[r] = state.sigma2;
    draws.tau2[r] = state.tau2;
    draws.lambda2.row(r) = state.lambda2.transpose();
    for (std::size_t k = 0; k < state.delta2.size(); ++k) draws.delta2[k].row(r) = state.delta2[k].transpose();
  }
  draws.guard_events = state.guard_events;
  return draws;
}

PosteriorSummary posterior_summary(const PosteriorDraws& draws) {
  if (draws.size() == 0) throw UsageError("posterior_summary: no retained draws");
  PosteriorSummary s;
  s.beta_bar = draws.beta.colwise().mean().transpose();
  s.sigma2_bar = draws.sigma2.mean();
  s.tau2_bar = draws.tau2.mean();
  s.lambda2_bar = draws.lambda2.colwise().mean().transpose();
  for (const auto& d : draws.delta2) s.delta2_bar.push_back(d.colwise().mean().transpose());
  return s;
}

}  // namespace gdss
