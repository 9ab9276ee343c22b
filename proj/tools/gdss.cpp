#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "gdss/errors.hpp"
#include "gdss/gibbs.hpp"
#include "gdss/io.hpp"
#include "gdss/report.hpp"
#include "gdss/simstudy.hpp"

namespace fs = std::filesystem;
using namespace gdss;

namespace {

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

// Bare criterion names expand over every requested df source.
std::vector<SelectionRule> build_rules(const std::string& criteria, const std::string& dfs) {
  std::vector<DofSource> sources;
  std::stringstream ds(dfs);
  std::string item;
  while (std::getline(ds, item, ',')) {
    if (!item.empty()) sources.push_back(parse_dof_source(item));
  }
  if (sources.empty()) throw UsageError("--df needs at least one of yl, pe");

  std::vector<SelectionRule> rules;
  std::stringstream cs(criteria);
  while (std::getline(cs, item, ',')) {
    if (item.empty()) continue;
    if (item == "all") {
      rules.push_back(SelectionRule::credible(Heuristic::kVarExp));
      rules.push_back(SelectionRule::credible(Heuristic::kExcErr));
      for (DofSource df : sources) {
        for (Criterion c : {Criterion::kBIC, Criterion::kAIC, Criterion::kAICc, Criterion::kMMLu}) {
          rules.push_back(SelectionRule::information(c, df));
        }
      }
    } else if (item == "varexp" || item == "excerr" || item.find('_') != std::string::npos) {
      rules.push_back(parse_rule(item));
    } else {
      const Criterion c = parse_criterion(item);
      for (DofSource df : sources) rules.push_back(SelectionRule::information(c, df));
    }
  }
  if (rules.empty()) throw UsageError("--criteria is empty");
  return rules;
}

struct FitArgs {
  std::string x, y, groups, expand, prior = "horseshoe", out;
  std::size_t iters = 10000, burnin = 1000;
  std::uint64_t seed = 1;
};

int cmd_fit(const FitArgs& a) {
  CsvMatrix xm = load_matrix_csv(a.x);
  Dataset data;
  data.X = xm.values;
  data.y = load_response_csv(a.y);
  data.names = xm.names;
  if (data.names.empty()) {
    for (Index j = 0; j < data.X.cols(); ++j) data.names.push_back("x" + std::to_string(j + 1));
  }
  if (data.X.rows() != data.y.size()) {
    throw DataError("X has " + std::to_string(data.X.rows()) + " rows but y has " + std::to_string(data.y.size()));
  }

  GroupHierarchy h;
  if (!a.expand.empty()) {
    if (!a.groups.empty()) throw UsageError("--groups and --expand cannot be combined");
    ExpandedDataset ex = expand_features(data, parse_recipe(a.expand));
    data = std::move(ex.data);
    std::vector<long> labels(static_cast<std::size_t>(data.X.cols()), 0);
    for (std::size_t g = 0; g < ex.groups.size(); ++g) {
      for (Index j : ex.groups[g]) labels[static_cast<std::size_t>(j)] = static_cast<long>(g + 1);
    }
    h = build_hierarchy(data.X.cols(), {labels});
  } else if (!a.groups.empty()) {
    h = load_group_spec(a.groups, data.X.cols());
  } else {
    h = build_hierarchy(data.X.cols(), {});
  }

  data = standardize(std::move(data));
  SamplerConfig cfg;
  cfg.prior = parse_prior(a.prior);
  cfg.iterations = a.iters;
  cfg.burn_in = a.burnin;
  cfg.seed = a.seed;
  FitRecord fit;
  fit.draws = run_chain(data.X, data.y, h, cfg);
  fit.hierarchy = h;
  fit.X = data.X;
  fit.y = data.y;
  fit.names = data.names;
  fit.transform = data.transform;
  write_fit(a.out, fit);
  std::printf("%s: %lld retained draws, n=%lld, p=%lld, %lld level(s)\n", a.out.c_str(),
              static_cast<long long>(fit.draws.size()), static_cast<long long>(fit.X.rows()),
              static_cast<long long>(fit.X.cols()), static_cast<long long>(h.num_levels()));
  if (fit.draws.guard_events > 0) {
    std::fprintf(stderr, "note: %zu zero-data-term guard events\n", fit.draws.guard_events);
  }
  return 0;
}

struct SparsifyArgs {
  std::string fit, criteria = "mmlu", df = "pe", out, table;
  Index level = 1, grid = 200;
};

int cmd_sparsify(const SparsifyArgs& a) {
  const FitRecord fit = read_fit(a.fit);
  const auto rules = build_rules(a.criteria, a.df);
  if (fit.hierarchy.num_levels() > 0 && (a.level < 1 || a.level > fit.hierarchy.num_levels())) {
    throw UsageError("--level " + std::to_string(a.level) + " does not exist in the stored hierarchy");
  }
  NngOptions nng;
  nng.grid_size = a.grid;
  const Index level = fit.hierarchy.num_levels() > 0 ? a.level - 1 : 0;
  // The df table is always built so heuristic rows can report df_PE.
  std::vector<SelectionRule> with_pe = rules;
  with_pe.push_back(SelectionRule::information(Criterion::kMMLu, DofSource::kPE));
  const SelectionContext ctx = prepare_selection(fit.X, fit.y, fit.hierarchy, fit.draws, level, with_pe, nng);
  const auto selections = run_selection(ctx, fit.draws, fit.X, rules);
  write_file(a.out, selection_report_json(fit, ctx, selections, level));
  const std::string table = selection_report_table(ctx, selections);
  if (a.table.empty()) {
    std::cout << table;
  } else {
    write_file(a.table, table);
  }
  return 0;
}

struct SimulateArgs {
  std::string design = "example1", prior = "horseshoe", criteria = "all", df = "yl,pe", out;
  double sigma2 = 0.0;
  Index reps = 100, grid = 200;
  std::uint64_t seed = 1;
  std::size_t iters = 10000, burnin = 1000;
  unsigned threads = 1;
};

int cmd_simulate(const SimulateArgs& a) {
  const double sigma2 = a.sigma2 > 0 ? a.sigma2 : (a.design == "example2" ? 16.0 : 4.0);
  const SimDesign design = design_by_name(a.design, sigma2);
  ReplicationOptions opt;
  opt.prior = parse_prior(a.prior);
  opt.iterations = a.iters;
  opt.burn_in = a.burnin;
  opt.replications = a.reps;
  opt.base_seed = a.seed;
  opt.threads = a.threads;
  opt.nng.grid_size = a.grid;
  const IdentificationTally tally = run_replications(design, build_rules(a.criteria, a.df), opt);
  const std::string table = tally_table(tally);
  if (a.out.empty()) {
    std::cout << table;
  } else {
    write_file(a.out + ".csv", tally_csv(tally));
    write_file(a.out + ".txt", table);
  }
  if (!tally.failures.empty()) {
    std::fprintf(stderr, "%zu replication(s) failed\n", tally.failures.size());
  }
  return tally.completed == 0 ? static_cast<int>(ExitCode::kNumerical) : 0;
}

struct GendataArgs {
  std::string design = "example1", out_dir = ".";
  double sigma2 = 0.0;
  std::uint64_t seed = 1, rep = 0;
};

int cmd_gendata(const GendataArgs& a) {
  const double sigma2 = a.sigma2 > 0 ? a.sigma2 : (a.design == "example2" ? 16.0 : 4.0);
  const SimDesign design = design_by_name(a.design, sigma2);
  RngStream rng(a.seed, a.rep);
  const SimDataset data = generate(design, rng);
  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  std::vector<std::string> names;
  for (Index j = 0; j < data.X.cols(); ++j) names.push_back("x" + std::to_string(j + 1));
  write_matrix_csv(dir / "X.csv", data.X, names);
  write_matrix_csv(dir / "y.csv", data.y, {"y"});
  write_matrix_csv(dir / "beta.csv", data.beta, {"beta"});
  write_file(dir / "groups.csv", group_spec_csv(data.hierarchy));
  std::printf("wrote %s/{X,y,beta,groups}.csv (n=%lld, p=%lld, SNR %.3f)\n", dir.string().c_str(),
              static_cast<long long>(data.X.rows()), static_cast<long long>(data.X.cols()), data.snr);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grouped shrinkage regression with decoupled sparsification"};
  app.require_subcommand(1);

  FitArgs fa;
  auto* fit = app.add_subcommand("fit", "run the Gibbs sampler and store the retained draws");
  fit->add_option("--x", fa.x, "predictor matrix CSV")->required();
  fit->add_option("--y", fa.y, "response CSV (one column)")->required();
  fit->add_option("--groups", fa.groups, "group spec CSV (level,group,column)");
  fit->add_option("--expand", fa.expand, "feature recipe, e.g. poly3:AGE,dummy:RACE");
  fit->add_option("--prior", fa.prior, "lasso, horseshoe or horseshoe+")->capture_default_str();
  fit->add_option("--iters", fa.iters, "total iterations")->capture_default_str();
  fit->add_option("--burnin", fa.burnin, "discarded iterations")->capture_default_str();
  fit->add_option("--seed", fa.seed, "random seed")->capture_default_str();
  fit->add_option("--out", fa.out, "draws container path (sidecar gets .json)")->required();

  SparsifyArgs sa;
  auto* sparsify = app.add_subcommand("sparsify", "group DSS path and model selection on a stored fit");
  sparsify->add_option("--fit", sa.fit, "draws container written by fit")->required();
  sparsify->add_option("--criteria", sa.criteria, "bic,aic,aicc,mmlu,varexp,excerr or all")->capture_default_str();
  sparsify->add_option("--df", sa.df, "yl, pe or yl,pe")->capture_default_str();
  sparsify->add_option("--level", sa.level, "hierarchy level to select on (1-based)")->capture_default_str();
  sparsify->add_option("--grid", sa.grid, "kappa grid size")->capture_default_str();
  sparsify->add_option("--out", sa.out, "selection report JSON")->required();
  sparsify->add_option("--table", sa.table, "write the text table here instead of stdout");

  SimulateArgs ma;
  auto* simulate = app.add_subcommand("simulate", "replicated identification study");
  simulate->add_option("--design", ma.design, "example1 or example2")->capture_default_str();
  simulate->add_option("--sigma2", ma.sigma2, "noise variance (default 4 for example1, 16 for example2)");
  simulate->add_option("--reps", ma.reps, "replications")->capture_default_str();
  simulate->add_option("--prior", ma.prior, "lasso, horseshoe or horseshoe+")->capture_default_str();
  simulate->add_option("--criteria", ma.criteria, "rules, e.g. mmlu_pe,bic_yl,varexp or all")->capture_default_str();
  simulate->add_option("--df", ma.df, "df sources for bare criterion names")->capture_default_str();
  simulate->add_option("--seed", ma.seed, "base seed")->capture_default_str();
  simulate->add_option("--iters", ma.iters, "iterations per chain")->capture_default_str();
  simulate->add_option("--burnin", ma.burnin, "burn-in per chain")->capture_default_str();
  simulate->add_option("--threads", ma.threads, "worker threads")->capture_default_str();
  simulate->add_option("--grid", ma.grid, "kappa grid size")->capture_default_str();
  simulate->add_option("--out", ma.out, "output prefix for .csv and .txt (default: table to stdout)");

  GendataArgs ga;
  auto* gendata = app.add_subcommand("gendata", "write one generated dataset as CSV");
  gendata->add_option("--design", ga.design, "example1 or example2")->capture_default_str();
  gendata->add_option("--sigma2", ga.sigma2, "noise variance");
  gendata->add_option("--seed", ga.seed, "seed")->capture_default_str();
  gendata->add_option("--rep", ga.rep, "replication (stream) index")->capture_default_str();
  gendata->add_option("--out-dir", ga.out_dir, "output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::kUsage);
  }

  try {
    if (*fit) return cmd_fit(fa);
    if (*sparsify) return cmd_sparsify(sa);
    if (*simulate) return cmd_simulate(ma);
    if (*gendata) return cmd_gendata(ga);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return static_cast<int>(e.exit_code());
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return static_cast<int>(ExitCode::kData);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return static_cast<int>(ExitCode::kNumerical);
  }
  return static_cast<int>(ExitCode::kUsage);
}
