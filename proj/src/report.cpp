#include "gdss/report.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "gdss/dof.hpp"
#include "gdss/errors.hpp"

namespace gdss {

using json = nlohmann::json;

std::vector<Selection> run_selection(const SelectionContext& ctx, const PosteriorDraws& draws,
                                     const Eigen::MatrixXd& X, const std::vector<SelectionRule>& rules) {
  std::vector<Selection> out;
  for (const auto& rule : rules) {
    Selection sel;
    sel.rule = rule;
    if (rule.kind == SelectionRule::Kind::kHeuristic) {
      const HeuristicChoice choice = select_heuristic(ctx.path, draws, X, rule.heuristic);
      const NngCandidate& cand = ctx.path.candidates[choice.candidate];
      sel.candidate = choice.candidate;
      sel.fallback = choice.fallback;
      sel.reference = choice.reference;
      sel.k = ctx.df_table ? dof_pe(cand.support, *ctx.df_table) : dof_yl(cand.d, ctx.path.sizes);
      const auto s2 = profile_sigma2(cand.sse, ctx.inputs.n, 0.0, ctx.inputs.sigma2_bar);
      sel.sigma2_hat = s2 ? *s2 : ctx.inputs.sigma2_bar;
    } else {
      const auto scores = score_path(ctx.path, ctx.inputs, rule.criterion, rule.df);
      const ModelScore& best = select_best(scores);
      sel.candidate = best.candidate;
      sel.k = best.k;
      sel.sigma2_hat = best.sigma2_hat;
      sel.total = best.total;
    }
    out.push_back(sel);
  }
  return out;
}

namespace {

std::vector<double> to_vec(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

std::vector<Index> one_based(const std::vector<Index>& groups) {
  std::vector<Index> out;
  for (Index g : groups) out.push_back(g + 1);
  return out;
}

}  // namespace

std::string selection_report_json(const FitRecord& fit, const SelectionContext& ctx,
                                  const std::vector<Selection>& selections, Index level) {
  json groups = json::array();
  for (Index g = 0; g < ctx.partition.num_groups(); ++g) {
    std::vector<Index> cols;
    for (Index j : ctx.partition.members[static_cast<std::size_t>(g)]) cols.push_back(j + 1);
    json entry = {{"id", g + 1}, {"columns", cols}, {"declared", g < ctx.partition.num_declared}};
    if (ctx.df_table) entry["df_pe"] = ctx.df_table->df[g];
    groups.push_back(entry);
  }

  json path = json::array();
  for (const auto& cand : ctx.path.candidates) {
    path.push_back({{"kappa", cand.kappa},
                    {"d", to_vec(cand.d)},
                    {"support", one_based(cand.support)},
                    {"sse", cand.sse},
                    {"df_yl", dof_yl(cand.d, ctx.path.sizes)}});
  }

  json rows = json::array();
  for (const auto& sel : selections) {
    const NngCandidate& cand = ctx.path.candidates[sel.candidate];
    const OriginalScaleFit orig = to_original_scale(fit.transform, cand.beta_kappa);
    const bool heuristic = sel.rule.kind == SelectionRule::Kind::kHeuristic;
    json row = {
        {"criterion", heuristic ? to_string(sel.rule.heuristic) : to_string(sel.rule.criterion)},
        {"df_source", heuristic ? "none" : to_string(sel.rule.df)},
        {"kappa", cand.kappa},
        {"support", one_based(cand.support)},
        {"k", sel.k},
        {"sigma2_hat", sel.sigma2_hat},
        {"total", sel.total ? json(*sel.total) : json(nullptr)},
        {"beta_standardized", to_vec(cand.beta_kappa)},
        {"beta_original", to_vec(orig.beta)},
        {"intercept", orig.intercept},
    };
    if (heuristic) {
      row["reference"] = sel.reference;
      row["fallback"] = sel.fallback;
    }
    rows.push_back(row);
  }

  json doc = {
      {"format", "gdss-selection"},
      {"version", 1},
      {"level", level + 1},
      {"n", fit.X.rows()},
      {"p", fit.X.cols()},
      {"prior", to_string(fit.draws.config.prior)},
      {"retained_draws", fit.draws.size()},
      {"sigma2_bar", ctx.inputs.sigma2_bar},
      {"y_norm2", ctx.inputs.y_norm2},
      {"columns", fit.names},
      {"groups", groups},
      {"path", path},
      {"selections", rows},
  };
  return doc.dump(2) + "\n";
}

std::string selection_report_table(const SelectionContext& ctx, const std::vector<Selection>& selections) {
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-8s %-4s %12s %8s %12s %12s  %s\n", "rule", "df", "kappa", "k", "sigma2_hat",
                "total", "support");
  out << buf;
  for (const auto& sel : selections) {
    const NngCandidate& cand = ctx.path.candidates[sel.candidate];
    const bool heuristic = sel.rule.kind == SelectionRule::Kind::kHeuristic;
    std::string support = "{";
    for (std::size_t i = 0; i < cand.support.size(); ++i) {
      support += (i ? "," : "") + std::to_string(cand.support[i] + 1);
    }
    support += "}";
    if (sel.fallback) support += " (fallback)";
    char total[32];
    if (sel.total) {
      std::snprintf(total, sizeof total, "%12.4f", *sel.total);
    } else {
      std::snprintf(total, sizeof total, "%12s", "-");
    }
    std::snprintf(buf, sizeof buf, "%-8s %-4s %12.6g %8.3f %12.6g %s  %s\n",
                  heuristic ? to_string(sel.rule.heuristic).c_str() : to_string(sel.rule.criterion).c_str(),
                  heuristic ? "-" : to_string(sel.rule.df).c_str(), cand.kappa, sel.k, sel.sigma2_hat, total,
                  support.c_str());
    out << buf;
  }
  return out.str();
}

}  // namespace gdss
