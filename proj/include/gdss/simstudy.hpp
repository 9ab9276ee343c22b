#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gdss/criteria.hpp"
#include "gdss/gibbs.hpp"
#include "gdss/groups.hpp"
#include "gdss/nng.hpp"
#include "gdss/random.hpp"

namespace gdss {

// Grouped Gaussian design. Predictors within a group share covariance
// `within_cov`; predictors in different groups are independent.
struct SimDesign {
  std::string name;
  Index n = 0;
  std::vector<Index> group_sizes;
  double variance = 1.0;
  double within_cov = 0.0;
  double sigma2 = 1.0;
  std::vector<std::pair<Index, double>> fixed_coefficients;  // 0-based predictor index
  std::vector<Index> random_sign_counts;  // per group: leading coefficients drawn from {-1, 1}

  Index num_predictors() const;
  void validate() const;
};

SimDesign example1_design(double sigma2);
SimDesign example2_design(double sigma2 = 16.0);
SimDesign design_by_name(const std::string& name, double sigma2);

struct SimDataset {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  Eigen::VectorXd beta;
  GroupHierarchy hierarchy;
  std::vector<bool> active_groups;
  double snr = 0.0;  // sample variance of X beta over sigma2
};

SimDataset generate(const SimDesign& design, RngStream& rng);
SimDataset gen_example1(double sigma2, RngStream& rng);
SimDataset gen_example2(RngStream& rng);

struct SelectionRule {
  enum class Kind { kCriterion, kHeuristic };
  Kind kind = Kind::kCriterion;
  Criterion criterion = Criterion::kMMLu;
  DofSource df = DofSource::kPE;
  Heuristic heuristic = Heuristic::kVarExp;

  static SelectionRule information(Criterion c, DofSource df);
  static SelectionRule credible(Heuristic h);
  std::string name() const;   // e.g. "mmlu_pe", "varexp"
  std::string label() const;  // e.g. "MMLu*", "VarExp"
};

SelectionRule parse_rule(const std::string& name);
// Comma-separated list; "all" expands to every rule in table order.
std::vector<SelectionRule> parse_rules(const std::string& list);
std::vector<SelectionRule> all_rules();

struct SelectionContext {
  PosteriorSummary summary;
  NngPath path;
  GroupPartition partition;
  std::optional<GroupDofTable> df_table;
  ScoringInputs inputs;
};

// Standardised X and centred y expected. The df table is computed only when
// one of `rules` needs it.
SelectionContext prepare_selection(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const GroupHierarchy& h,
                                   const PosteriorDraws& draws, Index level, const std::vector<SelectionRule>& rules,
                                   const NngOptions& nng = {});

// Index into context.path.candidates of the model chosen by `rule`.
std::size_t select_candidate(const SelectionContext& context, const PosteriorDraws& draws, const Eigen::MatrixXd& X,
                             const SelectionRule& rule);

struct ReplicationOptions {
  PriorKind prior = PriorKind::kGroupHorseshoe;
  std::size_t iterations = 10000;
  std::size_t burn_in = 1000;
  Index replications = 100;
  std::uint64_t base_seed = 1;
  unsigned threads = 1;
  NngOptions nng;
};

struct IdentificationTally {
  std::string design;
  std::vector<bool> active;
  std::vector<Index> group_sizes;
  std::vector<std::string> rules;
  std::vector<std::vector<Index>> counts;  // rule x group
  Index requested = 0;
  Index completed = 0;
  std::vector<std::string> failures;
  double mean_snr = 0.0;

  double rate(std::size_t rule, std::size_t group) const;  // percent of completed replications
  Index overall(std::size_t rule) const;                   // correct identifications, raw
  double overall_scaled(std::size_t rule) const;           // per 100 replications
  std::size_t rule_index(const std::string& name) const;
};

IdentificationTally run_replications(const SimDesign& design, const std::vector<SelectionRule>& rules,
                                     const ReplicationOptions& options);

std::string tally_csv(const IdentificationTally& tally);
std::string tally_table(const IdentificationTally& tally);

}  // namespace gdss
