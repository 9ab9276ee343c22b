#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gdss/dof.hpp"
#include "gdss/gibbs.hpp"
#include "gdss/groups.hpp"

namespace gdss {

struct CsvMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> names;  // from the header line, else empty
};

// Comma-separated, '.' decimal, optional single header row. A first line with
// any non-numeric cell is taken as the header.
CsvMatrix parse_csv(const std::string& text);
CsvMatrix load_matrix_csv(const std::filesystem::path& path);
Eigen::VectorXd load_response_csv(const std::filesystem::path& path);

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& values,
                      const std::vector<std::string>& names = {});

// Header "level,group,column"; levels and columns are 1-based, group labels arbitrary positive integers.
GroupHierarchy parse_group_spec(const std::string& text, Index p);
GroupHierarchy load_group_spec(const std::filesystem::path& path, Index p);
std::string group_spec_csv(const GroupHierarchy& h);

struct Standardization {
  Eigen::VectorXd x_mean;
  Eigen::VectorXd x_scale;  // sample standard deviation
  double y_mean = 0.0;
};

struct Dataset {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::vector<std::string> names;
  Standardization transform;
};

// Centre and scale the columns of X to unit sample variance and centre y.
// Throws DataError naming the first zero-variance column.
Standardization standardize_columns(Eigen::MatrixXd& X, Eigen::VectorXd& y, const std::vector<std::string>& names = {});
Dataset standardize(Dataset data);

struct OriginalScaleFit {
  Eigen::VectorXd beta;
  double intercept = 0.0;
};

// X_orig beta + intercept reproduces X_std beta_std + y_mean.
OriginalScaleFit to_original_scale(const Standardization& t, const Eigen::VectorXd& beta_std);

struct Expansion {
  enum class Kind { kPoly3, kDummy };
  Kind kind = Kind::kPoly3;
  std::string column;
};

// Recipe such as "poly3:AGE,poly3:LWT,dummy:RACE".
std::vector<Expansion> parse_recipe(const std::string& recipe);

struct ExpandedDataset {
  Dataset data;
  std::vector<std::vector<Index>> groups;  // columns of each expansion, 0-based
};

// poly3 keeps v and appends v^2, v^3 right after it; dummy replaces an integer
// column with indicators for every level but the lowest. Columns are matched by name.
ExpandedDataset expand_features(const Dataset& data, const std::vector<Expansion>& recipe);

inline constexpr char kDrawsMagic[4] = {'G', 'D', 'S', 'S'};
inline constexpr std::uint8_t kDrawsVersion = 1;

struct FitRecord {
  PosteriorDraws draws;
  GroupHierarchy hierarchy;
  Eigen::MatrixXd X;  // standardised
  Eigen::VectorXd y;  // centred
  std::vector<std::string> names;
  Standardization transform;
};

// Writes `path` (binary payload) and `path` + ".json" (sidecar).
void write_fit(const std::filesystem::path& path, const FitRecord& fit);
FitRecord read_fit(const std::filesystem::path& path);
std::filesystem::path sidecar_path(const std::filesystem::path& path);

}  // namespace gdss
