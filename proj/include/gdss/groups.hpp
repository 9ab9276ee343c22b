#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace gdss {

using Index = Eigen::Index;

/// Sentinel group index for a predictor that belongs to no group at a level.
inline constexpr int kUngrouped = -1;

/// One intermediate level of the hierarchy: disjoint groups over predictors.
struct GroupLevel {
  std::vector<int> group_of;               // size p; 0-based group index or kUngrouped
  std::vector<std::vector<Index>> members; // sorted predictor indices per group

  Index num_groups() const noexcept { return static_cast<Index>(members.size()); }
  Index group_size(Index g) const { return static_cast<Index>(members[static_cast<std::size_t>(g)].size()); }
};

/// Multilevel group hierarchy between the local (per-predictor) and global levels.
///
/// Levels are indexed from 0 here; files and the CLI use 1-based levels.
/// Groups within a level never overlap, groups across levels may.
class GroupHierarchy {
 public:
  GroupHierarchy() = default;
  GroupHierarchy(Index p, std::vector<GroupLevel> levels);

  Index num_predictors() const noexcept { return p_; }
  Index num_levels() const noexcept { return static_cast<Index>(levels_.size()); }
  const GroupLevel& level(Index k) const { return levels_.at(static_cast<std::size_t>(k)); }
  const std::vector<GroupLevel>& levels() const noexcept { return levels_; }

  /// Group index of predictor j at level k, or kUngrouped.
  int group_of(Index k, Index j) const { return level(k).group_of[static_cast<std::size_t>(j)]; }

 private:
  Index p_ = 0;
  std::vector<GroupLevel> levels_;
};

/// Build and validate a hierarchy from per-level label vectors.
///
/// Label 0 means ungrouped; any other nonnegative label names a group and is
/// renumbered contiguously in order of first appearance.
GroupHierarchy build_hierarchy(Index p, const std::vector<std::vector<long>>& level_labels);

/// Global, local and group scale parameters of the shrinkage prior.
struct ShrinkageScales {
  double tau2 = 1.0;
  Eigen::VectorXd lambda2;
  std::vector<Eigen::VectorXd> delta2;  // one vector per level, length G_k

  static ShrinkageScales unit(const GroupHierarchy& h);
  bool valid_for(const GroupHierarchy& h) const;
};

/// Group scale factor applied to predictor j at level k (1 when ungrouped).
double omega(const GroupHierarchy& h, const ShrinkageScales& s, Index k, Index j);

/// Diagonal of the product of all group-scale matrices (no tau2, no lambda2).
Eigen::VectorXd group_scale_product(const GroupHierarchy& h, const std::vector<Eigen::VectorXd>& delta2);

/// Prior variance diagonal divided by sigma2: tau2 * lambda2_j * prod_k Omega_{k,j}.
Eigen::VectorXd scale_diag(const GroupHierarchy& h, const ShrinkageScales& s);

/// prod_{i != k} Omega_{i,j}: the group-scale product leaving out level k.
Eigen::VectorXd scale_diag_excluding(const GroupHierarchy& h, const ShrinkageScales& s, Index k);
Eigen::VectorXd scale_diag_excluding(const GroupHierarchy& h, const std::vector<Eigen::VectorXd>& delta2,
                                     Index k);

/// A single-level partition of all predictors used for selection. Predictors
/// ungrouped at the chosen level become their own singleton groups, ordered
/// after the declared groups by predictor index.
struct GroupPartition {
  std::vector<std::vector<Index>> members;
  std::vector<Index> group_of;  // size p
  Index num_declared = 0;       // groups coming from the hierarchy level

  Index num_groups() const noexcept { return static_cast<Index>(members.size()); }
  Eigen::VectorXd sizes() const;
};

GroupPartition selection_partition(const GroupHierarchy& h, Index level);
/// Every predictor in its own group.
GroupPartition singleton_partition(Index p);

}  // namespace gdss
