#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gdss/io.hpp"
#include "gdss/simstudy.hpp"

namespace gdss {

struct Selection {
  SelectionRule rule;
  std::size_t candidate = 0;
  double k = 0.0;
  double sigma2_hat = 0.0;
  std::optional<double> total;  // absent for the credible-interval heuristics
  bool fallback = false;
  double reference = 0.0;  // heuristics only
};

// Heuristic rows report df_PE when the context has a table and df_YL otherwise,
// with sigma2_hat profiled at d = 0.
std::vector<Selection> run_selection(const SelectionContext& context, const PosteriorDraws& draws,
                                     const Eigen::MatrixXd& X, const std::vector<SelectionRule>& rules);

// JSON document validated by docs/selection_report.schema.json.
std::string selection_report_json(const FitRecord& fit, const SelectionContext& context,
                                  const std::vector<Selection>& selections, Index level);
std::string selection_report_table(const SelectionContext& context, const std::vector<Selection>& selections);

}  // namespace gdss
