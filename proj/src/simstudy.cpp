#include "gdss/simstudy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "gdss/dof.hpp"
#include "gdss/errors.hpp"
#include "gdss/io.hpp"

namespace gdss {

Index SimDesign::num_predictors() const {
  Index p = 0;
  for (Index s : group_sizes) p += s;
  return p;
}

void SimDesign::validate() const {
  if (n < 2) throw UsageError("design " + name + ": need at least two observations");
  if (group_sizes.empty()) throw UsageError("design " + name + ": no groups");
  for (Index s : group_sizes) {
    if (s < 1) throw UsageError("design " + name + ": empty group");
  }
  if (!(sigma2 > 0)) throw UsageError("design " + name + ": noise variance must be positive");
  if (!(variance > 0) || within_cov < 0 || within_cov >= variance) {
    throw UsageError("design " + name + ": predictor covariance is not positive definite");
  }
  const Index p = num_predictors();
  for (const auto& [j, b] : fixed_coefficients) {
    if (j < 0 || j >= p) throw UsageError("design " + name + ": coefficient index out of range");
  }
  if (!random_sign_counts.empty()) {
    if (random_sign_counts.size() != group_sizes.size()) {
      throw UsageError("design " + name + ": one random coefficient count per group required");
    }
    for (std::size_t g = 0; g < group_sizes.size(); ++g) {
      if (random_sign_counts[g] < 0 || random_sign_counts[g] > group_sizes[g]) {
        throw UsageError("design " + name + ": random coefficient count exceeds group size");
      }
    }
  }
}

SimDesign example1_design(double sigma2) {
  SimDesign d;
  d.name = "example1";
  d.n = 50;
  d.group_sizes = {5, 5, 10, 10, 15, 15};
  d.variance = 1.25;
  d.within_cov = 0.2 * 1.25;
  d.sigma2 = sigma2;
  d.fixed_coefficients = {{2, 3.2}, {10, -2.0}, {11, 1.0}, {30, 1.5}, {31, -1.5}};
  return d;
}

SimDesign example2_design(double sigma2) {
  SimDesign d;
  d.name = "example2";
  d.n = 200;
  d.group_sizes = std::vector<Index>(10, 10);
  d.variance = 1.0;
  d.within_cov = 0.0;
  d.sigma2 = sigma2;
  d.random_sign_counts = {10, 8, 6, 4, 2, 1, 0, 0, 0, 0};
  return d;
}

SimDesign design_by_name(const std::string& name, double sigma2) {
  if (name == "example1") return example1_design(sigma2);
  if (name == "example2") return example2_design(sigma2);
  throw UsageError("unknown design '" + name + "' (expected example1 or example2)");
}

SimDataset generate(const SimDesign& design, RngStream& rng) {
  design.validate();
  const Index n = design.n;
  const Index p = design.num_predictors();
  const auto G = design.group_sizes.size();

  std::vector<Index> start(G, 0);
  for (std::size_t g = 1; g < G; ++g) start[g] = start[g - 1] + design.group_sizes[g - 1];

  SimDataset out;
  out.beta = Eigen::VectorXd::Zero(p);
  for (const auto& [j, b] : design.fixed_coefficients) out.beta[j] = b;
  for (std::size_t g = 0; g < design.random_sign_counts.size(); ++g) {
    for (Index i = 0; i < design.random_sign_counts[g]; ++i) {
      out.beta[start[g] + i] = rng.uniform() < 0.5 ? -1.0 : 1.0;
    }
  }

  const double shared_sd = std::sqrt(design.within_cov);
  const double own_sd = std::sqrt(design.variance - design.within_cov);
  out.X.resize(n, p);
  for (Index i = 0; i < n; ++i) {
    for (std::size_t g = 0; g < G; ++g) {
      const double shared = shared_sd > 0 ? shared_sd * rng.normal() : 0.0;
      for (Index m = 0; m < design.group_sizes[g]; ++m) out.X(i, start[g] + m) = shared + own_sd * rng.normal();
    }
  }
  const Eigen::VectorXd signal = out.X * out.beta;
  const double noise_sd = std::sqrt(design.sigma2);
  out.y.resize(n);
  for (Index i = 0; i < n; ++i) out.y[i] = signal[i] + noise_sd * rng.normal();

  const double centred = (signal.array() - signal.mean()).square().sum() / static_cast<double>(n - 1);
  out.snr = centred / design.sigma2;

  std::vector<long> labels(static_cast<std::size_t>(p));
  out.active_groups.assign(G, false);
  for (std::size_t g = 0; g < G; ++g) {
    for (Index m = 0; m < design.group_sizes[g]; ++m) {
      const Index j = start[g] + m;
      labels[static_cast<std::size_t>(j)] = static_cast<long>(g + 1);
      if (out.beta[j] != 0.0) out.active_groups[g] = true;
    }
  }
  out.hierarchy = build_hierarchy(p, {labels});
  return out;
}

SimDataset gen_example1(double sigma2, RngStream& rng) { return generate(example1_design(sigma2), rng); }

SimDataset gen_example2(RngStream& rng) { return generate(example2_design(), rng); }

SelectionRule SelectionRule::information(Criterion c, DofSource df) {
  SelectionRule r;
  r.kind = Kind::kCriterion;
  r.criterion = c;
  r.df = df;
  return r;
}

SelectionRule SelectionRule::credible(Heuristic h) {
  SelectionRule r;
  r.kind = Kind::kHeuristic;
  r.heuristic = h;
  return r;
}

std::string SelectionRule::name() const {
  if (kind == Kind::kHeuristic) return to_string(heuristic);
  return to_string(criterion) + "_" + to_string(df);
}

std::string SelectionRule::label() const {
  if (kind == Kind::kHeuristic) return heuristic == Heuristic::kVarExp ? "VarExp" : "ExcErr";
  std::string base;
  switch (criterion) {
    case Criterion::kBIC: base = "BIC"; break;
    case Criterion::kAIC: base = "AIC"; break;
    case Criterion::kAICc: base = "AICc"; break;
    case Criterion::kMMLu: base = "MMLu"; break;
  }
  return df == DofSource::kPE ? base + "*" : base;
}

SelectionRule parse_rule(const std::string& name) {
  if (name == "varexp") return SelectionRule::credible(Heuristic::kVarExp);
  if (name == "excerr") return SelectionRule::credible(Heuristic::kExcErr);
  const auto cut = name.find('_');
  if (cut == std::string::npos) throw UsageError("unknown selection rule '" + name + "'");
  return SelectionRule::information(parse_criterion(name.substr(0, cut)), parse_dof_source(name.substr(cut + 1)));
}

std::vector<SelectionRule> all_rules() {
  std::vector<SelectionRule> rules = {SelectionRule::credible(Heuristic::kVarExp),
                                      SelectionRule::credible(Heuristic::kExcErr)};
  for (DofSource df : {DofSource::kYL, DofSource::kPE}) {
    for (Criterion c : {Criterion::kBIC, Criterion::kAIC, Criterion::kAICc, Criterion::kMMLu}) {
      rules.push_back(SelectionRule::information(c, df));
    }
  }
  return rules;
}

std::vector<SelectionRule> parse_rules(const std::string& list) {
  std::vector<SelectionRule> rules;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if (item == "all") {
      for (const auto& r : all_rules()) rules.push_back(r);
    } else {
      rules.push_back(parse_rule(item));
    }
  }
  if (rules.empty()) throw UsageError("no selection rules given");
  return rules;
}

SelectionContext prepare_selection(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const GroupHierarchy& h,
                                   const PosteriorDraws& draws, Index level, const std::vector<SelectionRule>& rules,
                                   const NngOptions& nng) {
  SelectionContext ctx;
  ctx.summary = posterior_summary(draws);
  ctx.partition = h.num_levels() > 0 ? selection_partition(h, level) : singleton_partition(h.num_predictors());
  ctx.path = group_dss(X, ctx.summary.beta_bar, ctx.partition, nng);
  const bool need_pe = std::any_of(rules.begin(), rules.end(), [](const SelectionRule& r) {
    return r.kind == SelectionRule::Kind::kCriterion && r.df == DofSource::kPE;
  });
  if (need_pe) ctx.df_table = group_dof_pe(draws, X, h, ctx.partition);
  ctx.inputs.n = X.rows();
  ctx.inputs.sigma2_bar = ctx.summary.sigma2_bar;
  ctx.inputs.y_norm2 = y.squaredNorm();
  ctx.inputs.df_table = ctx.df_table;
  return ctx;
}

std::size_t select_candidate(const SelectionContext& ctx, const PosteriorDraws& draws, const Eigen::MatrixXd& X,
                             const SelectionRule& rule) {
  if (rule.kind == SelectionRule::Kind::kHeuristic) {
    return select_heuristic(ctx.path, draws, X, rule.heuristic).candidate;
  }
  const auto scores = score_path(ctx.path, ctx.inputs, rule.criterion, rule.df);
  return select_best(scores).candidate;
}

double IdentificationTally::rate(std::size_t rule, std::size_t group) const {
  if (completed == 0) return 0.0;
  return 100.0 * static_cast<double>(counts.at(rule).at(group)) / static_cast<double>(completed);
}

Index IdentificationTally::overall(std::size_t rule) const {
  Index correct = 0;
  for (std::size_t g = 0; g < active.size(); ++g) {
    correct += active[g] ? counts.at(rule)[g] : completed - counts.at(rule)[g];
  }
  return correct;
}

double IdentificationTally::overall_scaled(std::size_t rule) const {
  if (completed == 0) return 0.0;
  return 100.0 * static_cast<double>(overall(rule)) / static_cast<double>(completed);
}

std::size_t IdentificationTally::rule_index(const std::string& name) const {
  for (std::size_t r = 0; r < rules.size(); ++r) {
    if (rules[r] == name) return r;
  }
  throw UsageError("tally has no rule '" + name + "'");
}

namespace {

struct ReplicationResult {
  bool ok = false;
  std::string error;
  double snr = 0.0;
  std::vector<std::vector<bool>> selected;  // rule x group
};

ReplicationResult run_one(const SimDesign& design, const std::vector<SelectionRule>& rules,
                          const ReplicationOptions& options, Index r) {
  ReplicationResult res;
  try {
    RngStream rng(options.base_seed, static_cast<std::uint64_t>(r));
    SimDataset data = generate(design, rng);
    res.snr = data.snr;
    standardize_columns(data.X, data.y);

    SamplerConfig cfg;
    cfg.prior = options.prior;
    cfg.iterations = options.iterations;
    cfg.burn_in = options.burn_in;
    cfg.seed = options.base_seed;
    // Data generation uses stream r; the chain gets its own stream.
    cfg.stream = static_cast<std::uint64_t>(r) + (std::uint64_t{1} << 32);
    const PosteriorDraws draws = run_chain(data.X, data.y, data.hierarchy, cfg);

    const SelectionContext ctx = prepare_selection(data.X, data.y, data.hierarchy, draws, 0, rules, options.nng);
    const auto G = design.group_sizes.size();
    for (const auto& rule : rules) {
      const std::size_t pick = select_candidate(ctx, draws, data.X, rule);
      std::vector<bool> chosen(G, false);
      for (Index g : ctx.path.candidates[pick].support) {
        if (g < static_cast<Index>(G)) chosen[static_cast<std::size_t>(g)] = true;
      }
      res.selected.push_back(std::move(chosen));
    }
    res.ok = true;
  } catch (const std::exception& e) {
    res.error = e.what();
  }
  return res;
}

}  // namespace

IdentificationTally run_replications(const SimDesign& design, const std::vector<SelectionRule>& rules,
                                     const ReplicationOptions& options) {
  design.validate();
  if (options.replications < 1) throw UsageError("run_replications: need at least one replication");
  if (rules.empty()) throw UsageError("run_replications: no selection rules");
  if (options.iterations <= options.burn_in) throw UsageError("run_replications: iterations must exceed burn-in");

  const auto reps = static_cast<std::size_t>(options.replications);
  std::vector<ReplicationResult> results(reps);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r = next++; r < reps; r = next++) {
      results[r] = run_one(design, rules, options, static_cast<Index>(r));
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(reps)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  IdentificationTally tally;
  tally.design = design.name;
  tally.group_sizes = design.group_sizes;
  tally.requested = options.replications;
  for (const auto& rule : rules) tally.rules.push_back(rule.name());
  tally.counts.assign(rules.size(), std::vector<Index>(design.group_sizes.size(), 0));

  tally.active.assign(design.group_sizes.size(), false);
  for (const auto& [j, b] : design.fixed_coefficients) {
    if (b == 0.0) continue;
    Index end = 0;
    for (std::size_t g = 0; g < design.group_sizes.size(); ++g) {
      end += design.group_sizes[g];
      if (j < end) {
        tally.active[g] = true;
        break;
      }
    }
  }
  for (std::size_t g = 0; g < design.random_sign_counts.size(); ++g) {
    if (design.random_sign_counts[g] > 0) tally.active[g] = true;
  }

  double snr_sum = 0.0;
  for (std::size_t r = 0; r < reps; ++r) {
    const auto& res = results[r];
    if (!res.ok) {
      tally.failures.push_back("replication " + std::to_string(r) + ": " + res.error);
      continue;
    }
    ++tally.completed;
    snr_sum += res.snr;
    for (std::size_t k = 0; k < rules.size(); ++k) {
      for (std::size_t g = 0; g < res.selected[k].size(); ++g) {
        if (res.selected[k][g]) ++tally.counts[k][g];
      }
    }
  }
  tally.mean_snr = tally.completed > 0 ? snr_sum / static_cast<double>(tally.completed) : 0.0;
  return tally;
}

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

std::string tally_csv(const IdentificationTally& t) {
  std::ostringstream out;
  out << "rule,group,active,size,selected,replications,percent\n";
  for (std::size_t r = 0; r < t.rules.size(); ++r) {
    for (std::size_t g = 0; g < t.active.size(); ++g) {
      out << t.rules[r] << ',' << g + 1 << ',' << (t.active[g] ? 1 : 0) << ',' << t.group_sizes[g] << ','
          << t.counts[r][g] << ',' << t.completed << ',' << fmt("%.1f", t.rate(r, g)) << '\n';
    }
    out << t.rules[r] << ",overall,,," << t.overall(r) << ',' << t.completed << ','
        << fmt("%.1f", t.overall_scaled(r)) << '\n';
  }
  return out.str();
}

std::string tally_table(const IdentificationTally& t) {
  std::vector<std::string> labels;
  for (const auto& name : t.rules) labels.push_back(parse_rule(name).label());

  std::ostringstream out;
  out << "design " << t.design << ", " << t.completed << " of " << t.requested << " replications completed";
  out << ", mean SNR " << fmt("%.2f", t.mean_snr) << '\n';
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-8s %-8s", "Group", "Active");
  out << buf;
  for (const auto& l : labels) {
    std::snprintf(buf, sizeof buf, " %8s", l.c_str());
    out << buf;
  }
  out << '\n';
  for (std::size_t g = 0; g < t.active.size(); ++g) {
    const std::string name = (t.active[g] ? "*" : "") + std::to_string(g + 1);
    const std::string size = (t.active[g] ? "yes/" : "no/") + std::to_string(t.group_sizes[g]);
    std::snprintf(buf, sizeof buf, "%-8s %-8s", name.c_str(), size.c_str());
    out << buf;
    for (std::size_t r = 0; r < t.rules.size(); ++r) {
      std::snprintf(buf, sizeof buf, " %8.1f", t.rate(r, g));
      out << buf;
    }
    out << '\n';
  }
  std::snprintf(buf, sizeof buf, "%-17s", "Overall");
  out << buf;
  for (std::size_t r = 0; r < t.rules.size(); ++r) {
    std::snprintf(buf, sizeof buf, " %8.1f", t.overall_scaled(r));
    out << buf;
  }
  out << '\n';
  for (const auto& f : t.failures) out << "failed: " << f << '\n';
  return out.str();
}

}  // namespace gdss
