#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ada/types.hpp"

namespace ada {

struct NoNormalization {};
struct MinMaxNormalization {
  Vector lo;
  Vector hi;
};
using Normalization = std::variant<NoNormalization, MinMaxNormalization>;

struct TabularDataset {
  Matrix x;
  Vector y;
  std::vector<std::string> feature_names;
  Normalization normalization = NoNormalization{};
  std::size_t imputed_cells = 0;

  Index n() const { return x.rows(); }
  Index d() const { return x.cols(); }
};

struct CsvOptions {
  // A single delimiter character, or nullopt for runs of whitespace.
  std::optional<char> delimiter = ',';
  bool header = true;
  // Column name (requires a header) or zero-based index; negative counts from
  // the end, so -1 is the last column.
  std::variant<std::string, int> target = -1;
};

/// Parses a numeric table. Quoted fields follow RFC 4180. Empty cells and the
/// tokens NA, NaN, ? are treated as missing and imputed with the column mean.
TabularDataset load_csv(const std::filesystem::path& path, const CsvOptions& opts);
TabularDataset parse_csv(const std::string& text, const CsvOptions& opts);

// Fits per-feature [lo, hi] on ds. Constant columns map to 0; their names are
// returned through `constant_columns` for the caller to report.
TabularDataset minmax_normalize(const TabularDataset& ds,
                                std::vector<std::string>* constant_columns = nullptr);

// Applies a fitted min-max map to raw features.
Matrix minmax_apply(const MinMaxNormalization& norm, const Matrix& raw);
Matrix minmax_inverse(const MinMaxNormalization& norm, const Matrix& scaled);

struct SplitSpec {
  // Counts when `fractions` is false, otherwise fractions of n.
  double train = 0.6;
  double val = 0.2;
  double test = 0.2;
  bool fractions = true;
  std::uint64_t seed = 0;
  bool ordered = false;
};

struct SplitIndices {
  std::vector<std::size_t> train, val, test;
};

SplitIndices split_indices(std::size_t n, const SplitSpec& spec);

struct DatasetSplits {
  TabularDataset train, val, test;
};

DatasetSplits split(const TabularDataset& ds, const SplitSpec& spec);

TabularDataset take_rows(const TabularDataset& ds, const std::vector<std::size_t>& rows);

/// Dataset descriptor file (JSON):
///   {"path": "airfoil_self_noise.dat", "delimiter": "whitespace",
///    "header": false, "target": -1, "normalize": "minmax",
///    "split": {"train": 1003, "val": 300, "test": 200, "seed": 0,
///              "ordered": false}}
/// Relative paths resolve against the descriptor's directory.
struct DatasetDescriptor {
  std::string name;
  std::filesystem::path path;
  CsvOptions csv;
  bool minmax = true;
  SplitSpec split;
  std::vector<std::string> feature_names;
};

DatasetDescriptor load_descriptor(const std::filesystem::path& file);
DatasetDescriptor parse_descriptor(const std::string& json_text,
                                   const std::filesystem::path& base_dir);

// Loads, optionally normalizes, and splits as the descriptor says.
DatasetSplits load_splits(const DatasetDescriptor& desc);

}  // namespace ada
