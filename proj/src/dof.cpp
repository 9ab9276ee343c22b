#include "gdss/dof.hpp"

#include "gdss/errors.hpp"

namespace gdss {

double dof_yl(const Eigen::VectorXd& d, const Eigen::VectorXd& sizes) {
  if (d.size() != sizes.size()) throw UsageError("dof_yl: dimension mismatch");
  double df = 0.0;
  for (Index g = 0; g < d.size(); ++g) {
    if (d[g] < 0) throw UsageError("dof_yl: shrinkage factors must be nonnegative");
    if (d[g] > 0) df += 2.0;
    df += d[g] * (sizes[g] - 2.0);
  }
  return df;
}

namespace {

Eigen::MatrixXd regularised_inverse(const Eigen::MatrixXd& XgtXg, const Eigen::VectorXd& prior_var) {
  Eigen::MatrixXd M = XgtXg;
  M.diagonal() += prior_var.cwiseInverse();
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success) throw NumericalError("group df: Xg'Xg + Sigma_g is not positive definite");
  return llt.solve(Eigen::MatrixXd::Identity(M.rows(), M.cols()));
}

}  // namespace

double group_ridge_dof(const Eigen::MatrixXd& XgtXg, const Eigen::VectorXd& prior_var) {
  return (XgtXg * regularised_inverse(XgtXg, prior_var)).trace();
}

GroupDofTable group_dof_pe(const PosteriorDraws& draws, const Eigen::MatrixXd& X, const GroupHierarchy& h,
                           const GroupPartition& groups, Index thin) {
  if (draws.size() == 0) throw UsageError("group_dof_pe: no retained draws");
  if (thin < 1) throw UsageError("group_dof_pe: thinning factor must be at least 1");
  if (X.cols() != h.num_predictors() || draws.num_predictors() != h.num_predictors()) {
    throw UsageError("group_dof_pe: dimension mismatch");
  }
  const Index G = groups.num_groups();
  std::vector<Eigen::MatrixXd> gram(static_cast<std::size_t>(G));
  std::vector<Eigen::MatrixXd> mean_inverse(static_cast<std::size_t>(G));
  for (Index g = 0; g < G; ++g) {
    const auto& members = groups.members[static_cast<std::size_t>(g)];
    Eigen::MatrixXd Xg(X.rows(), static_cast<Index>(members.size()));
    for (std::size_t i = 0; i < members.size(); ++i) Xg.col(static_cast<Index>(i)) = X.col(members[i]);
    gram[static_cast<std::size_t>(g)] = Xg.transpose() * Xg;
    mean_inverse[static_cast<std::size_t>(g)] = Eigen::MatrixXd::Zero(Xg.cols(), Xg.cols());
  }

  Index used = 0;
  for (Index i = 0; i < draws.size(); i += thin, ++used) {
    const Eigen::VectorXd prior_var = scale_diag(h, draws.scales(i));
    for (Index g = 0; g < G; ++g) {
      const auto& members = groups.members[static_cast<std::size_t>(g)];
      Eigen::VectorXd var_g(static_cast<Index>(members.size()));
      for (std::size_t m = 0; m < members.size(); ++m) var_g[static_cast<Index>(m)] = prior_var[members[m]];
      mean_inverse[static_cast<std::size_t>(g)] += regularised_inverse(gram[static_cast<std::size_t>(g)], var_g);
    }
  }

  GroupDofTable table;
  table.df.resize(G);
  for (Index g = 0; g < G; ++g) {
    const auto gs = static_cast<std::size_t>(g);
    table.df[g] = (gram[gs] * mean_inverse[gs]).trace() / static_cast<double>(used);
  }
  return table;
}

double dof_pe(const std::vector<Index>& support, const GroupDofTable& table) {
  double df = 0.0;
  for (Index g : support) {
    if (g < 0 || g >= table.df.size()) throw UsageError("dof_pe: support refers to an unknown group");
    df += table.df[g];
  }
  return df;
}

}  // namespace gdss
