#include "gdss/groups.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "gdss/errors.hpp"

namespace gdss {

GroupHierarchy::GroupHierarchy(Index p, std::vector<GroupLevel> levels) : p_(p), levels_(std::move(levels)) {
  if (p < 0) throw DataError("group hierarchy: negative predictor count");
  for (std::size_t k = 0; k < levels_.size(); ++k) {
    GroupLevel& lvl = levels_[k];
    const std::string where = "level " + std::to_string(k + 1);
    if (static_cast<Index>(lvl.group_of.size()) != p) {
      throw DataError("group hierarchy: " + where + " assigns " + std::to_string(lvl.group_of.size()) +
                      " predictors, expected " + std::to_string(p));
    }
    std::vector<int> seen(static_cast<std::size_t>(p), kUngrouped);
    for (std::size_t g = 0; g < lvl.members.size(); ++g) {
      auto& m = lvl.members[g];
      if (m.empty()) throw DataError("group hierarchy: " + where + " group " + std::to_string(g + 1) + " is empty");
      std::sort(m.begin(), m.end());
      for (Index j : m) {
        if (j < 0 || j >= p) throw DataError("group hierarchy: " + where + " predictor index out of range");
        auto& slot = seen[static_cast<std::size_t>(j)];
        if (slot != kUngrouped) {
          throw DataError("group hierarchy: " + where + " predictor " + std::to_string(j + 1) +
                          " belongs to more than one group");
        }
        slot = static_cast<int>(g);
      }
    }
    if (seen != lvl.group_of) {
      throw DataError("group hierarchy: " + where + " membership map disagrees with member sets");
    }
  }
}

GroupHierarchy build_hierarchy(Index p, const std::vector<std::vector<long>>& level_labels) {
  std::vector<GroupLevel> levels;
  levels.reserve(level_labels.size());
  for (std::size_t k = 0; k < level_labels.size(); ++k) {
    const auto& labels = level_labels[k];
    if (static_cast<Index>(labels.size()) != p) {
      throw DataError("build_hierarchy: level " + std::to_string(k + 1) + " has " + std::to_string(labels.size()) +
                      " labels, expected " + std::to_string(p));
    }
    GroupLevel lvl;
    lvl.group_of.assign(labels.size(), kUngrouped);
    std::map<long, int> renumber;
    for (std::size_t j = 0; j < labels.size(); ++j) {
      const long label = labels[j];
      if (label < 0) throw DataError("build_hierarchy: negative group label at level " + std::to_string(k + 1));
      if (label == 0) continue;
      auto [it, inserted] = renumber.emplace(label, static_cast<int>(lvl.members.size()));
      if (inserted) lvl.members.emplace_back();
      lvl.group_of[j] = it->second;
      lvl.members[static_cast<std::size_t>(it->second)].push_back(static_cast<Index>(j));
    }
    levels.push_back(std::move(lvl));
  }
  return GroupHierarchy(p, std::move(levels));
}

ShrinkageScales ShrinkageScales::unit(const GroupHierarchy& h) {
  ShrinkageScales s;
  s.tau2 = 1.0;
  s.lambda2 = Eigen::VectorXd::Ones(h.num_predictors());
  for (const auto& lvl : h.levels()) s.delta2.push_back(Eigen::VectorXd::Ones(lvl.num_groups()));
  return s;
}

bool ShrinkageScales::valid_for(const GroupHierarchy& h) const {
  if (!(tau2 > 0) || !std::isfinite(tau2)) return false;
  if (lambda2.size() != h.num_predictors() || !(lambda2.array() > 0).all() || !lambda2.allFinite()) return false;
  if (static_cast<Index>(delta2.size()) != h.num_levels()) return false;
  for (Index k = 0; k < h.num_levels(); ++k) {
    const auto& d = delta2[static_cast<std::size_t>(k)];
    if (d.size() != h.level(k).num_groups() || !(d.array() > 0).all() || !d.allFinite()) return false;
  }
  return true;
}

double omega(const GroupHierarchy& h, const ShrinkageScales& s, Index k, Index j) {
  const int g = h.group_of(k, j);
  return g == kUngrouped ? 1.0 : s.delta2[static_cast<std::size_t>(k)][g];
}

Eigen::VectorXd group_scale_product(const GroupHierarchy& h, const std::vector<Eigen::VectorXd>& delta2) {
  Eigen::VectorXd out = Eigen::VectorXd::Ones(h.num_predictors());
  for (Index k = 0; k < h.num_levels(); ++k) {
    const auto& groups = h.level(k).group_of;
    const auto& d = delta2[static_cast<std::size_t>(k)];
    for (Index j = 0; j < out.size(); ++j) {
      const int g = groups[static_cast<std::size_t>(j)];
      if (g != kUngrouped) out[j] *= d[g];
    }
  }
  return out;
}

Eigen::VectorXd scale_diag(const GroupHierarchy& h, const ShrinkageScales& s) {
  return s.tau2 * s.lambda2.cwiseProduct(group_scale_product(h, s.delta2));
}

Eigen::VectorXd scale_diag_excluding(const GroupHierarchy& h, const std::vector<Eigen::VectorXd>& delta2,
                                     Index k) {
  Eigen::VectorXd out = Eigen::VectorXd::Ones(h.num_predictors());
  for (Index i = 0; i < h.num_levels(); ++i) {
    if (i == k) continue;
    const auto& groups = h.level(i).group_of;
    const auto& d = delta2[static_cast<std::size_t>(i)];
    for (Index j = 0; j < out.size(); ++j) {
      const int g = groups[static_cast<std::size_t>(j)];
      if (g != kUngrouped) out[j] *= d[g];
    }
  }
  return out;
}

Eigen::VectorXd scale_diag_excluding(const GroupHierarchy& h, const ShrinkageScales& s, Index k) {
  return scale_diag_excluding(h, s.delta2, k);
}

Eigen::VectorXd GroupPartition::sizes() const {
  Eigen::VectorXd s(num_groups());
  for (Index g = 0; g < s.size(); ++g) s[g] = static_cast<double>(members[static_cast<std::size_t>(g)].size());
  return s;
}

GroupPartition selection_partition(const GroupHierarchy& h, Index level) {
  if (level < 0 || level >= h.num_levels()) {
    throw UsageError("selection level " + std::to_string(level + 1) + " does not exist in the hierarchy");
  }
  const GroupLevel& lvl = h.level(level);
  GroupPartition part;
  part.members = lvl.members;
  part.num_declared = lvl.num_groups();
  part.group_of.resize(static_cast<std::size_t>(h.num_predictors()));
  for (Index j = 0; j < h.num_predictors(); ++j) {
    int g = lvl.group_of[static_cast<std::size_t>(j)];
    if (g == kUngrouped) {
      g = static_cast<int>(part.members.size());
      part.members.push_back({j});
    }
    part.group_of[static_cast<std::size_t>(j)] = g;
  }
  return part;
}

GroupPartition singleton_partition(Index p) {
  GroupPartition part;
  part.group_of.resize(static_cast<std::size_t>(p));
  for (Index j = 0; j < p; ++j) {
    part.members.push_back({j});
    part.group_of[static_cast<std::size_t>(j)] = j;
  }
  return part;
}

}  // namespace gdss
