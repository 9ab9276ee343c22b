#pragma once

#include <vector>

#include <Eigen/Dense>

#include "gdss/groups.hpp"

namespace gdss {

/// One candidate sparsified model on the group non-negative garrotte path.
struct NngCandidate {
  double kappa = 0.0;
  Eigen::VectorXd d;           // group shrinkage factors, length G
  std::vector<Index> support;  // groups with d_g > 0, ascending
  Eigen::VectorXd beta_kappa;  // empty until reconstruct_beta is applied
  double sse = 0.0;            // ||y_bar - Z d||^2
};

struct NngPath {
  std::vector<NngCandidate> candidates;  // strictly decreasing kappa
  Eigen::MatrixXd Z;
  Eigen::VectorXd y_bar;
  Eigen::VectorXd sizes;
  std::vector<Index> forced_inactive;  // groups whose Z column is exactly zero
};

struct NngOptions {
  Index grid_size = 200;
  double min_ratio = 1e-6;      // smallest nonzero kappa as a fraction of kappa_max
  double gap_tolerance = 1e-10; // duality gap relative to ||y_bar||^2
  Index max_sweeps = 100000;
};

template <typename DerivedX, typename DerivedB>
Eigen::Matrix<typename DerivedX::Scalar, Eigen::Dynamic, 1> smoothed_target(const Eigen::MatrixBase<DerivedX>& X,
                                                                           const Eigen::MatrixBase<DerivedB>& beta_bar) {
  return X * beta_bar;
}

/// Column g is X_g beta_bar_g.
Eigen::MatrixXd group_design(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta_bar, const GroupPartition& groups);

/// Largest kappa at which some group can enter: max_g max(Z_g' y_bar, 0) / s_g.
double nng_kappa_max(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y_bar, const Eigen::VectorXd& sizes);

/// Exact minimiser of 0.5 ||y_bar - Z d||^2 + kappa sum_g s_g d_g subject to d >= 0.
/// Cyclic coordinate descent to the duality-gap tolerance, then a support polish.
Eigen::VectorXd nng_solve(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y_bar, const Eigen::VectorXd& sizes,
                          double kappa, const Eigen::VectorXd& warm_start = {}, const NngOptions& options = {});

/// Largest KKT violation of d at kappa (absolute, same units as ||y_bar||^2).
double nng_kkt_violation(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y_bar, const Eigen::VectorXd& sizes,
                         double kappa, const Eigen::VectorXd& d);

/// Candidate path over a log-spaced kappa grid plus kappa = 0, with one
/// candidate per distinct support (the smallest kappa that produced it).
NngPath nng_path(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y_bar, const Eigen::VectorXd& sizes,
                 const NngOptions& options = {});

/// beta_kappa_j = d_{g(j)} * beta_bar_j.
Eigen::VectorXd reconstruct_beta(const Eigen::VectorXd& d, const Eigen::VectorXd& beta_bar,
                                 const GroupPartition& groups);

/// Smoothed target, group design, path, and beta_kappa for every candidate.
NngPath group_dss(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta_bar, const GroupPartition& groups,
                  const NngOptions& options = {});

}  // namespace gdss
