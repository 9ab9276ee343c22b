#include "gdss/nng.hpp"

#include <algorithm>
#include <cmath>

#include "gdss/errors.hpp"

namespace gdss {

Eigen::MatrixXd group_design(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta_bar, const GroupPartition& groups) {
  if (X.cols() != beta_bar.size() || static_cast<Index>(groups.group_of.size()) != X.cols()) {
    throw UsageError("group_design: dimension mismatch");
  }
  Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(X.rows(), groups.num_groups());
  for (Index j = 0; j < X.cols(); ++j) Z.col(groups.group_of[static_cast<std::size_t>(j)]) += X.col(j) * beta_bar[j];
  return Z;
}

double nng_kappa_max(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y_bar, const Eigen::VectorXd& sizes) {
  const Eigen::VectorXd corr = Z.transpose() * y_bar;
  double best = 0.0;
  for (Index g = 0; g < corr.size(); ++g) best = std::max(best, std::max(corr[g], 0.0) / sizes[g]);
  return best;
}

namespace {

struct NngProblem {
  Eigen::MatrixXd Q;  // Z'Z
  Eigen::VectorXd b;  // Z'y_bar
  double yy = 0.0;
};

// Gradient of 0.5 d'Qd - b'd + w'd.
Eigen::VectorXd gradient(const NngProblem& prob, const Eigen::VectorXd& w, const Eigen::VectorXd& d) {
  return prob.Q * d - prob.b + w;
}

double kkt_violation(const Eigen::VectorXd& grad, const Eigen::VectorXd& d) {
  double v = 0.0;
  for (Index g = 0; g < d.size(); ++g) v = std::max(v, d[g] > 0 ? std::abs(grad[g]) : std::max(0.0, -grad[g]));
  return v;
}

double duality_gap(const NngProblem& prob, const Eigen::VectorXd& w, const Eigen::VectorXd& d) {
  // With r = y - Zd: ||r||^2 = yy - 2 b'd + d'Qd and Z'r = b - Qd.
  const Eigen::VectorXd Qd = prob.Q * d;
  const double rr = std::max(0.0, prob.yy - 2.0 * prob.b.dot(d) + d.dot(Qd));
  const Eigen::VectorXd Zr = prob.b - Qd;
  double scale = 1.0;
  for (Index g = 0; g < Zr.size(); ++g) {
    if (Zr[g] > w[g]) scale = std::min(scale, w[g] / Zr[g]);
  }
  const double primal = 0.5 * rr + w.dot(d);
  // Dual value 0.5||y||^2 - 0.5||y - theta||^2 at theta = scale * r.
  const double ry = prob.yy - prob.b.dot(d);  // r'y
  const double dual = scale * ry - 0.5 * scale * scale * rr;
  return primal - dual;
}

// Solve on the support exactly; keep the result only if it is KKT-feasible.
bool polish(const NngProblem& prob, const Eigen::VectorXd& w, Eigen::VectorXd& d) {
  std::vector<Index> active;
  for (Index g = 0; g < d.size(); ++g)
    if (d[g] > 0) active.push_back(g);
  Eigen::VectorXd candidate = Eigen::VectorXd::Zero(d.size());
  if (!active.empty()) {
    const auto m = static_cast<Index>(active.size());
    Eigen::MatrixXd Qa(m, m);
    Eigen::VectorXd rhs(m);
    for (Index i = 0; i < m; ++i) {
      rhs[i] = prob.b[active[i]] - w[active[i]];
      for (Index k = 0; k < m; ++k) Qa(i, k) = prob.Q(active[i], active[k]);
    }
    Eigen::LLT<Eigen::MatrixXd> llt(Qa);
    if (llt.info() != Eigen::Success) return false;
    const Eigen::VectorXd sol = llt.solve(rhs);
    for (Index i = 0; i < m; ++i) {
      if (!(sol[i] > 0)) return false;
      candidate[active[i]] = sol[i];
    }
  }
  const Eigen::VectorXd grad = gradient(prob, w, candidate);
  if (kkt_violation(grad, candidate) > 1e-11 * std::max(prob.yy, 1e-300)) return false;
  d = candidate;
  return true;
}

Eigen::VectorXd solve_impl(const NngProblem& prob, const Eigen::VectorXd& w, Eigen::VectorXd d,
                           const NngOptions& opt) {
  const Index G = prob.b.size();
  const double tol = opt.gap_tolerance * std::max(prob.yy, 1e-300);
  Eigen::VectorXd grad = gradient(prob, w, d);
  for (Index sweep = 0; sweep < opt.max_sweeps; ++sweep) {
    for (Index g = 0; g < G; ++g) {
      const double qgg = prob.Q(g, g);
      if (qgg <= 0.0) {
        d[g] = 0.0;
        continue;
      }
      const double updated = std::max(0.0, d[g] - grad[g] / qgg);
      const double delta = updated - d[g];
      if (delta != 0.0) {
        grad += delta * prob.Q.col(g);
        d[g] = updated;
      }
    }
    grad = gradient(prob, w, d);
    // An exact solve on the current support ends the search once it is KKT-feasible.
    Eigen::VectorXd polished = d;
    if (polish(prob, w, polished)) return polished;
    if (duality_gap(prob, w, d) <= tol) break;
  }
  return d;
}

NngProblem make_problem(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y_bar) {
  return NngProblem{Z.transpose() * Z, Z.transpose() * y_bar, y_bar.squaredNorm()};
}

}  // namespace

Eigen::VectorXd nng_solve(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y_bar, const Eigen::VectorXd& sizes,
                          double kappa, const Eigen::VectorXd& warm_start, const NngOptions& options) {
  if (Z.rows() != y_bar.size() || Z.cols() != sizes.size()) throw UsageError("nng_solve: dimension mismatch");
  if (!(kappa >= 0)) throw UsageError("nng_solve: kappa must be nonnegative");
  const NngProblem prob = make_problem(Z, y_bar);
  Eigen::VectorXd start = Eigen::VectorXd::Zero(Z.cols());
  if (warm_start.size() == Z.cols()) start = warm_start.cwiseMax(0.0);
  return solve_impl(prob, kappa * sizes, std::move(start), options);
}

double nng_kkt_violation(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y_bar, const Eigen::VectorXd& sizes,
                         double kappa, const Eigen::VectorXd& d) {
  const NngProblem prob = make_problem(Z, y_bar);
  return kkt_violation(gradient(prob, kappa * sizes, d), d);
}

NngPath nng_path(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y_bar, const Eigen::VectorXd& sizes,
                 const NngOptions& options) {
  if (options.grid_size < 2) throw UsageError("nng_path: grid size must be at least 2");
  if (Z.rows() != y_bar.size() || Z.cols() != sizes.size()) throw UsageError("nng_path: dimension mismatch");
  const Index G = Z.cols();
  NngPath path;
  path.Z = Z;
  path.y_bar = y_bar;
  path.sizes = sizes;
  for (Index g = 0; g < G; ++g)
    if (Z.col(g).isZero(0.0)) path.forced_inactive.push_back(g);

  const NngProblem prob = make_problem(Z, y_bar);
  const double kappa_max = nng_kappa_max(Z, y_bar, sizes);

  std::vector<double> grid;
  if (kappa_max > 0) {
    for (Index i = 0; i < options.grid_size; ++i) {
      const double frac = static_cast<double>(i) / static_cast<double>(options.grid_size - 1);
      grid.push_back(kappa_max * std::pow(options.min_ratio, frac));
    }
  }
  grid.push_back(0.0);

  Eigen::VectorXd d = Eigen::VectorXd::Zero(G);
  for (double kappa : grid) {
    d = solve_impl(prob, kappa * sizes, d, options);
    NngCandidate cand;
    cand.kappa = kappa;
    cand.d = d;
    for (Index g = 0; g < G; ++g)
      if (d[g] > 0) cand.support.push_back(g);
    cand.sse = (y_bar - Z * d).squaredNorm();
    if (!path.candidates.empty() && path.candidates.back().support == cand.support) {
      path.candidates.back() = std::move(cand);
    } else {
      path.candidates.push_back(std::move(cand));
    }
  }
  return path;
}

Eigen::VectorXd reconstruct_beta(const Eigen::VectorXd& d, const Eigen::VectorXd& beta_bar,
                                 const GroupPartition& groups) {
  if (d.size() != groups.num_groups() || static_cast<Index>(groups.group_of.size()) != beta_bar.size()) {
    throw UsageError("reconstruct_beta: dimension mismatch");
  }
  Eigen::VectorXd out(beta_bar.size());
  for (Index j = 0; j < beta_bar.size(); ++j) out[j] = d[groups.group_of[static_cast<std::size_t>(j)]] * beta_bar[j];
  return out;
}

NngPath group_dss(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta_bar, const GroupPartition& groups,
                  const NngOptions& options) {
  const Eigen::VectorXd y_bar = smoothed_target(X, beta_bar);
  const Eigen::MatrixXd Z = group_design(X, beta_bar, groups);
  NngPath path = nng_path(Z, y_bar, groups.sizes(), options);
  for (auto& cand : path.candidates) cand.beta_kappa = reconstruct_beta(cand.d, beta_bar, groups);
  return path;
}

}  // namespace gdss
