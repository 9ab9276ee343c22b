#include "gdss/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gdss/errors.hpp"

namespace gdss {

using json = nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool parse_double(const std::string& cell, double& out) {
  if (cell.empty()) return false;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (*first == '+') ++first;
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

bool parse_long(const std::string& cell, long& out) {
  if (cell.empty()) return false;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return res.ec == std::errc() && res.ptr == cell.data() + cell.size();
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("write failed for " + path.string());
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

CsvMatrix parse_csv(const std::string& text) {
  CsvMatrix out;
  std::vector<std::vector<double>> rows;
  std::stringstream ss(text);
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_line(line);
    std::vector<double> row(cells.size());
    bool numeric = true;
    std::size_t bad = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!parse_double(cells[c], row[c])) {
        numeric = false;
        bad = c;
        break;
      }
    }
    if (!numeric) {
      if (rows.empty() && out.names.empty() && line_no == 1) {
        out.names = cells;
        width = cells.size();
        continue;
      }
      throw ParseError("non-numeric cell '" + cells[bad] + "' in column " + std::to_string(bad + 1), line_no);
    }
    if (width == 0) width = row.size();
    if (row.size() != width) {
      throw ParseError("expected " + std::to_string(width) + " cells, found " + std::to_string(row.size()), line_no);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("CSV contains no data rows");
  out.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < width; ++j) out.values(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  }
  return out;
}

CsvMatrix load_matrix_csv(const std::filesystem::path& path) {
  try {
    return parse_csv(read_text(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

Eigen::VectorXd load_response_csv(const std::filesystem::path& path) {
  const CsvMatrix m = load_matrix_csv(path);
  if (m.values.cols() != 1) throw DataError(path.string() + ": response file must have exactly one column");
  return m.values.col(0);
}

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& values,
                      const std::vector<std::string>& names) {
  std::ostringstream out;
  if (!names.empty()) {
    if (static_cast<Index>(names.size()) != values.cols()) throw UsageError("write_matrix_csv: name count mismatch");
    for (std::size_t j = 0; j < names.size(); ++j) out << (j ? "," : "") << names[j];
    out << '\n';
  }
  for (Index i = 0; i < values.rows(); ++i) {
    for (Index j = 0; j < values.cols(); ++j) out << (j ? "," : "") << format_double(values(i, j));
    out << '\n';
  }
  write_text(path, out.str());
}

GroupHierarchy parse_group_spec(const std::string& text, Index p) {
  std::stringstream ss(text);
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  std::map<long, std::vector<long>> labels;  // level -> label per predictor
  std::map<long, std::vector<std::size_t>> where;
  while (std::getline(ss, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_line(line);
    if (!header) {
      if (cells != std::vector<std::string>{"level", "group", "column"}) {
        throw ParseError("group spec must start with the header level,group,column", line_no);
      }
      header = true;
      continue;
    }
    if (cells.size() != 3) throw ParseError("expected 3 cells", line_no);
    long level = 0, group = 0, column = 0;
    if (!parse_long(cells[0], level) || !parse_long(cells[1], group) || !parse_long(cells[2], column)) {
      throw ParseError("non-integer cell", line_no);
    }
    if (level < 1) throw ParseError("levels are numbered from 1", line_no);
    if (group < 1) throw ParseError("group labels must be positive", line_no);
    if (column < 1 || column > p) {
      throw ParseError("column " + std::to_string(column) + " outside 1.." + std::to_string(p), line_no);
    }
    auto& lab = labels[level];
    auto& src = where[level];
    if (lab.empty()) {
      lab.assign(static_cast<std::size_t>(p), 0);
      src.assign(static_cast<std::size_t>(p), 0);
    }
    auto& slot = lab[static_cast<std::size_t>(column - 1)];
    if (slot != 0) {
      throw ParseError("predictor " + std::to_string(column) + " assigned twice at level " + std::to_string(level) +
                           " (first on line " + std::to_string(src[static_cast<std::size_t>(column - 1)]) + ")",
                       line_no);
    }
    slot = group;
    src[static_cast<std::size_t>(column - 1)] = line_no;
  }
  if (!header) throw ParseError("group spec is empty", line_no == 0 ? 1 : line_no);
  std::vector<std::vector<long>> levels;
  long expected = 1;
  for (auto& [level, lab] : labels) {
    if (level != expected) throw DataError("group spec levels must be numbered 1..K without gaps");
    levels.push_back(std::move(lab));
    ++expected;
  }
  return build_hierarchy(p, levels);
}

GroupHierarchy load_group_spec(const std::filesystem::path& path, Index p) {
  try {
    return parse_group_spec(read_text(path), p);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

std::string group_spec_csv(const GroupHierarchy& h) {
  std::ostringstream out;
  out << "level,group,column\n";
  for (Index k = 0; k < h.num_levels(); ++k) {
    const auto& lvl = h.level(k);
    for (Index g = 0; g < lvl.num_groups(); ++g) {
      for (Index j : lvl.members[static_cast<std::size_t>(g)]) out << k + 1 << ',' << g + 1 << ',' << j + 1 << '\n';
    }
  }
  return out.str();
}

Standardization standardize_columns(Eigen::MatrixXd& X, Eigen::VectorXd& y, const std::vector<std::string>& names) {
  if (X.rows() != y.size()) throw DataError("X has " + std::to_string(X.rows()) + " rows but y has " +
                                            std::to_string(y.size()) + " entries");
  if (X.rows() < 2) throw DataError("need at least two observations");
  Standardization t;
  const double n = static_cast<double>(X.rows());
  t.x_mean = X.colwise().mean().transpose();
  t.x_scale.resize(X.cols());
  for (Index j = 0; j < X.cols(); ++j) {
    X.col(j).array() -= t.x_mean[j];
    const double sd = std::sqrt(X.col(j).squaredNorm() / (n - 1.0));
    if (!(sd > 1e-12 * std::max(1.0, std::abs(t.x_mean[j])))) {
      const std::string label = static_cast<Index>(names.size()) == X.cols() && !names[static_cast<std::size_t>(j)].empty()
                                    ? "'" + names[static_cast<std::size_t>(j)] + "'"
                                    : std::to_string(j + 1);
      throw DataError("column " + label + " has zero variance");
    }
    X.col(j) /= sd;
    t.x_scale[j] = sd;
  }
  t.y_mean = y.mean();
  y.array() -= t.y_mean;
  return t;
}

Dataset standardize(Dataset data) {
  data.transform = standardize_columns(data.X, data.y, data.names);
  return data;
}

OriginalScaleFit to_original_scale(const Standardization& t, const Eigen::VectorXd& beta_std) {
  OriginalScaleFit fit;
  fit.beta = beta_std.cwiseQuotient(t.x_scale);
  fit.intercept = t.y_mean - t.x_mean.dot(fit.beta);
  return fit;
}

std::vector<Expansion> parse_recipe(const std::string& recipe) {
  std::vector<Expansion> out;
  std::stringstream ss(recipe);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto cut = item.find(':');
    if (cut == std::string::npos) throw UsageError("recipe item '" + item + "' must look like poly3:NAME or dummy:NAME");
    Expansion e;
    const std::string kind = item.substr(0, cut);
    if (kind == "poly3") {
      e.kind = Expansion::Kind::kPoly3;
    } else if (kind == "dummy") {
      e.kind = Expansion::Kind::kDummy;
    } else {
      throw UsageError("unknown expansion '" + kind + "'");
    }
    e.column = item.substr(cut + 1);
    if (e.column.empty()) throw UsageError("recipe item '" + item + "' names no column");
    out.push_back(e);
  }
  return out;
}

ExpandedDataset expand_features(const Dataset& data, const std::vector<Expansion>& recipe) {
  const Index p = data.X.cols();
  std::vector<std::string> names = data.names;
  if (names.empty()) {
    for (Index j = 0; j < p; ++j) names.push_back("x" + std::to_string(j + 1));
  }
  if (static_cast<Index>(names.size()) != p) throw DataError("column name count does not match X");

  std::map<std::string, Expansion::Kind> plan;
  for (const auto& e : recipe) {
    if (std::find(names.begin(), names.end(), e.column) == names.end()) {
      throw UsageError("recipe names unknown column '" + e.column + "'");
    }
    if (!plan.emplace(e.column, e.kind).second) throw UsageError("column '" + e.column + "' expanded twice");
  }

  std::vector<Eigen::VectorXd> cols;
  ExpandedDataset out;
  for (Index j = 0; j < p; ++j) {
    const std::string& name = names[static_cast<std::size_t>(j)];
    const Eigen::VectorXd v = data.X.col(j);
    const auto it = plan.find(name);
    if (it == plan.end()) {
      cols.push_back(v);
      out.data.names.push_back(name);
      continue;
    }
    std::vector<Index> group;
    if (it->second == Expansion::Kind::kPoly3) {
      const Eigen::VectorXd v2 = v.array().square();
      const Eigen::VectorXd v3 = v.array().cube();
      for (const auto& [col, suffix] : {std::pair{v, ""}, std::pair{v2, "^2"}, std::pair{v3, "^3"}}) {
        group.push_back(static_cast<Index>(cols.size()));
        cols.push_back(col);
        out.data.names.push_back(name + suffix);
      }
    } else {
      std::set<long> levels;
      for (Index i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i]) || v[i] != std::round(v[i])) {
          throw DataError("dummy coding needs an integer-coded categorical column; '" + name + "' is not");
        }
        levels.insert(static_cast<long>(v[i]));
      }
      if (levels.size() < 2) throw DataError("categorical column '" + name + "' has a single level");
      levels.erase(levels.begin());
      for (long level : levels) {
        group.push_back(static_cast<Index>(cols.size()));
        cols.push_back((v.array() == static_cast<double>(level)).cast<double>());
        out.data.names.push_back(name + "=" + std::to_string(level));
      }
    }
    out.groups.push_back(std::move(group));
  }
  out.data.X.resize(data.X.rows(), static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.data.X.col(static_cast<Index>(j)) = cols[j];
  out.data.y = data.y;
  return out;
}

// ---------------------------------------------------------------------------
// Draws container

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  std::filesystem::path s = path;
  s += ".json";
  return s;
}

namespace {

struct Block {
  std::string name;
  Index rows;
  Index cols;
};

void put_double(std::string& buf, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  char bytes[8];
  std::memcpy(bytes, &bits, 8);
  buf.append(bytes, 8);
}

double get_double(const char* p) {
  std::uint64_t bits;
  std::memcpy(&bits, p, 8);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  return std::bit_cast<double>(bits);
}

void append_block(std::string& buf, json& blocks, const std::string& name, const Eigen::MatrixXd& m,
                  std::size_t& offset) {
  blocks.push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}, {"offset", offset}});
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) put_double(buf, m(i, j));
  }
  offset += static_cast<std::size_t>(m.size());
}

std::vector<double> to_vec(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd from_vec(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Index>(v.size()));
}

}  // namespace

void write_fit(const std::filesystem::path& path, const FitRecord& fit) {
  const PosteriorDraws& d = fit.draws;
  const Index p = d.num_predictors();
  if (fit.X.cols() != p || fit.y.size() != fit.X.rows() || fit.hierarchy.num_predictors() != p) {
    throw UsageError("write_fit: inconsistent dimensions");
  }
  std::string payload;
  payload.append(kDrawsMagic, 4);
  payload.push_back(static_cast<char>(kDrawsVersion));

  json blocks = json::array();
  std::size_t offset = 0;
  append_block(payload, blocks, "beta", d.beta, offset);
  append_block(payload, blocks, "sigma2", d.sigma2, offset);
  append_block(payload, blocks, "tau2", d.tau2, offset);
  append_block(payload, blocks, "lambda2", d.lambda2, offset);
  for (std::size_t k = 0; k < d.delta2.size(); ++k) {
    append_block(payload, blocks, "delta2_level" + std::to_string(k + 1), d.delta2[k], offset);
  }
  append_block(payload, blocks, "x_standardized", fit.X, offset);
  append_block(payload, blocks, "y_centered", fit.y, offset);

  const PosteriorSummary s = posterior_summary(d);
  const OriginalScaleFit orig = to_original_scale(fit.transform, s.beta_bar);
  const GroupPartition part =
      fit.hierarchy.num_levels() > 0 ? selection_partition(fit.hierarchy, 0) : singleton_partition(p);
  const GroupDofTable table = group_dof_pe(d, fit.X, fit.hierarchy, part);

  json levels = json::array();
  for (Index k = 0; k < fit.hierarchy.num_levels(); ++k) {
    std::vector<int> labels;
    for (int g : fit.hierarchy.level(k).group_of) labels.push_back(g == kUngrouped ? 0 : g + 1);
    levels.push_back(labels);
  }

  json side = {
      {"format", "gdss-draws"},
      {"version", kDrawsVersion},
      {"byte_order", "little"},
      {"payload_offset", 5},
      {"element", "float64"},
      {"layout", "column-major"},
      {"blocks", blocks},
      {"dims", {{"n", fit.X.rows()}, {"p", p}, {"retained", d.size()}}},
      {"config",
       {{"prior", to_string(d.config.prior)},
        {"iterations", d.config.iterations},
        {"burn_in", d.config.burn_in},
        {"seed", d.config.seed},
        {"stream", d.config.stream}}},
      {"columns", fit.names},
      {"groups", levels},
      {"standardization",
       {{"x_mean", to_vec(fit.transform.x_mean)},
        {"x_scale", to_vec(fit.transform.x_scale)},
        {"y_mean", fit.transform.y_mean}}},
      {"summary",
       {{"beta_bar", to_vec(s.beta_bar)},
        {"beta_bar_original", to_vec(orig.beta)},
        {"intercept", orig.intercept},
        {"sigma2_bar", s.sigma2_bar},
        {"tau2_bar", s.tau2_bar}}},
      {"df_table", {{"level", fit.hierarchy.num_levels() > 0 ? 1 : 0}, {"df", to_vec(table.df)}}},
      {"guard_events", d.guard_events},
  };

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw DataError("write failed for " + path.string());
  out.close();
  write_text(sidecar_path(path), side.dump(2) + "\n");
}

FitRecord read_fit(const std::filesystem::path& path) {
  json side;
  try {
    side = json::parse(read_text(sidecar_path(path)));
  } catch (const json::exception& e) {
    throw DataError(sidecar_path(path).string() + ": " + e.what());
  }
  const std::string bytes = read_text(path);
  if (bytes.size() < 5 || std::memcmp(bytes.data(), kDrawsMagic, 4) != 0) {
    throw DataError(path.string() + ": not a draws container");
  }
  if (static_cast<std::uint8_t>(bytes[4]) != kDrawsVersion) {
    throw DataError(path.string() + ": unsupported container version " +
                    std::to_string(static_cast<int>(static_cast<std::uint8_t>(bytes[4]))));
  }
  try {
    if (side.at("format") != "gdss-draws") throw DataError("sidecar format mismatch");
    const std::size_t n_doubles = (bytes.size() - 5) / 8;
    if ((bytes.size() - 5) % 8 != 0) throw DataError(path.string() + ": truncated payload");

    std::map<std::string, Eigen::MatrixXd> blocks;
    for (const auto& b : side.at("blocks")) {
      const auto rows = b.at("rows").get<Index>();
      const auto cols = b.at("cols").get<Index>();
      const auto offset = b.at("offset").get<std::size_t>();
      if (rows < 0 || cols < 0 || offset + static_cast<std::size_t>(rows * cols) > n_doubles) {
        throw DataError(path.string() + ": block '" + b.at("name").get<std::string>() + "' exceeds the payload");
      }
      Eigen::MatrixXd m(rows, cols);
      const char* base = bytes.data() + 5 + offset * 8;
      for (Index j = 0; j < cols; ++j) {
        for (Index i = 0; i < rows; ++i) m(i, j) = get_double(base + 8 * (j * rows + i));
      }
      blocks[b.at("name").get<std::string>()] = std::move(m);
    }
    auto block = [&](const std::string& name) -> Eigen::MatrixXd& {
      const auto it = blocks.find(name);
      if (it == blocks.end()) throw DataError(path.string() + ": missing block '" + name + "'");
      return it->second;
    };

    FitRecord fit;
    const auto p = side.at("dims").at("p").get<Index>();
    std::vector<std::vector<long>> labels;
    for (const auto& lvl : side.at("groups")) labels.push_back(lvl.get<std::vector<long>>());
    fit.hierarchy = build_hierarchy(p, labels);

    PosteriorDraws& d = fit.draws;
    d.beta = block("beta");
    d.sigma2 = block("sigma2").col(0);
    d.tau2 = block("tau2").col(0);
    d.lambda2 = block("lambda2");
    for (Index k = 0; k < fit.hierarchy.num_levels(); ++k) d.delta2.push_back(block("delta2_level" + std::to_string(k + 1)));
    const auto& cfg = side.at("config");
    d.config.prior = parse_prior(cfg.at("prior").get<std::string>());
    d.config.iterations = cfg.at("iterations").get<std::size_t>();
    d.config.burn_in = cfg.at("burn_in").get<std::size_t>();
    d.config.seed = cfg.at("seed").get<std::uint64_t>();
    d.config.stream = cfg.at("stream").get<std::uint64_t>();
    d.guard_events = side.value("guard_events", std::size_t{0});

    fit.X = block("x_standardized");
    fit.y = block("y_centered").col(0);
    fit.names = side.at("columns").get<std::vector<std::string>>();
    const auto& st = side.at("standardization");
    fit.transform.x_mean = from_vec(st.at("x_mean"));
    fit.transform.x_scale = from_vec(st.at("x_scale"));
    fit.transform.y_mean = st.at("y_mean").get<double>();

    if (d.beta.cols() != p || fit.X.cols() != p || d.lambda2.cols() != p || fit.y.size() != fit.X.rows() ||
        d.sigma2.size() != d.size() || d.tau2.size() != d.size() || fit.transform.x_scale.size() != p) {
      throw DataError(path.string() + ": block dimensions are inconsistent");
    }
    return fit;
  } catch (const json::exception& e) {
    throw DataError(sidecar_path(path).string() + ": " + e.what());
  }
}

}  // namespace gdss
