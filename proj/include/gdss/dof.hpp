#pragma once

#include <vector>

#include <Eigen/Dense>

#include "gdss/gibbs.hpp"
#include "gdss/groups.hpp"

namespace gdss {

/// Posterior-expected degrees of freedom of each group at the selection level.
struct GroupDofTable {
  Eigen::VectorXd df;  // df_g, one entry per group of the partition
};

/// Closed-form degrees-of-freedom estimate for the group non-negative garrotte:
/// 2 * #{d_g > 0} + sum_g d_g (s_g - 2).
double dof_yl(const Eigen::VectorXd& d, const Eigen::VectorXd& sizes);

/// Ridge-trace degrees of freedom of one group under a single prior-variance draw:
/// tr(Xg'Xg (Xg'Xg + diag(1 / prior_var))^{-1}).
double group_ridge_dof(const Eigen::MatrixXd& XgtXg, const Eigen::VectorXd& prior_var);

/// df_g = tr(Xg'Xg E[(Xg'Xg + Sigma_g)^{-1} | y]), the expectation being the
/// mean over retained draws (every `thin`-th). Sigma_g is diagonal with
/// entries 1 / (tau2 lambda2_j prod_k Omega_{k,j}).
GroupDofTable group_dof_pe(const PosteriorDraws& draws, const Eigen::MatrixXd& X, const GroupHierarchy& h,
                           const GroupPartition& groups, Index thin = 1);

/// Sum of df_g over the support.
double dof_pe(const std::vector<Index>& support, const GroupDofTable& table);

}  // namespace gdss
