#include "ada/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ada/rng.hpp"

namespace ada {

namespace {

using Row = std::vector<std::string>;

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

Row split_whitespace(const std::string& line) {
  Row out;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

// One logical record starting at `pos`; quoted fields may span lines.
bool next_record(const std::string& text, std::size_t& pos, char delim, Row& row,
                 std::size_t& line) {
  row.clear();
  if (pos >= text.size()) return false;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  while (pos < text.size()) {
    const char c = text[pos];
    if (quoted) {
      if (c == '"') {
        if (pos + 1 < text.size() && text[pos + 1] == '"') {
          field.push_back('"');
          pos += 2;
          continue;
        }
        quoted = false;
        ++pos;
        continue;
      }
      if (c == '\n') ++line;
      field.push_back(c);
      ++pos;
      continue;
    }
    if (c == '"' && trim(field).empty()) {
      quoted = true;
      was_quoted = true;
      field.clear();
      ++pos;
      continue;
    }
    if (c == delim) {
      row.push_back(was_quoted ? field : trim(field));
      field.clear();
      was_quoted = false;
      ++pos;
      continue;
    }
    if (c == '\n' || c == '\r') {
      if (c == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') ++pos;
      ++pos;
      ++line;
      row.push_back(was_quoted ? field : trim(field));
      return true;
    }
    field.push_back(c);
    ++pos;
  }
  if (quoted) {
    throw Error(ErrorKind::Data,
                "unterminated quoted field at line " + std::to_string(line));
  }
  row.push_back(was_quoted ? field : trim(field));
  ++line;
  return true;
}

bool is_missing(const std::string& s) {
  return s.empty() || s == "NA" || s == "NaN" || s == "nan" || s == "?";
}

std::optional<double> parse_number(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) return std::nullopt;
  return v;
}

bool blank(const Row& r) {
  return r.empty() || (r.size() == 1 && r[0].empty());
}

}  // namespace

TabularDataset parse_csv(const std::string& text, const CsvOptions& opts) {
  std::vector<Row> rows;
  std::vector<std::size_t> line_of;
  {
    std::size_t line = 1;
    if (opts.delimiter) {
      std::size_t pos = 0;
      Row r;
      std::size_t start_line = line;
      while (next_record(text, pos, *opts.delimiter, r, line)) {
        if (!blank(r)) {
          rows.push_back(r);
          line_of.push_back(start_line);
        }
        start_line = line;
      }
    } else {
      std::istringstream is(text);
      std::string l;
      while (std::getline(is, l)) {
        Row r = split_whitespace(l);
        if (!r.empty()) {
          rows.push_back(std::move(r));
          line_of.push_back(line);
        }
        ++line;
      }
    }
  }
  if (rows.empty()) throw Error(ErrorKind::Data, "table is empty");

  Row header;
  std::size_t first_data = 0;
  if (opts.header) {
    header = rows[0];
    first_data = 1;
  }
  const std::size_t ncol = rows[first_data < rows.size() ? first_data : 0].size();
  if (opts.header && header.size() != ncol && first_data < rows.size()) {
    throw Error(ErrorKind::Data, "header has " + std::to_string(header.size()) +
                                     " columns but line " +
                                     std::to_string(line_of[first_data]) + " has " +
                                     std::to_string(ncol));
  }
  if (ncol < 2) throw Error(ErrorKind::Data, "need at least one feature and a target");

  std::size_t target = 0;
  if (const auto* name = std::get_if<std::string>(&opts.target)) {
    if (!opts.header) throw Error(ErrorKind::Config, "target by name requires a header");
    auto it = std::find(header.begin(), header.end(), *name);
    if (it == header.end()) {
      throw Error(ErrorKind::Data, "target column '" + *name + "' not found");
    }
    target = static_cast<std::size_t>(it - header.begin());
  } else {
    const int idx = std::get<int>(opts.target);
    const long resolved = idx < 0 ? static_cast<long>(ncol) + idx : idx;
    if (resolved < 0 || resolved >= static_cast<long>(ncol)) {
      throw Error(ErrorKind::Data, "target column index " + std::to_string(idx) +
                                       " out of range for " + std::to_string(ncol) +
                                       " columns");
    }
    target = static_cast<std::size_t>(resolved);
  }

  const std::size_t n = rows.size() - first_data;
  if (n == 0) throw Error(ErrorKind::Data, "table has no data rows");
  const auto d = static_cast<Index>(ncol - 1);
  TabularDataset ds;
  ds.x.resize(static_cast<Index>(n), d);
  ds.y.resize(static_cast<Index>(n));
  for (std::size_t c = 0; c < ncol; ++c) {
    if (c == target) continue;
    ds.feature_names.push_back(opts.header ? header[c] : "x" + std::to_string(c));
  }

  std::vector<std::vector<Index>> missing(static_cast<std::size_t>(d));
  for (std::size_t r = 0; r < n; ++r) {
    const Row& row = rows[first_data + r];
    const std::size_t line = line_of[first_data + r];
    if (row.size() != ncol) {
      throw Error(ErrorKind::Data, "line " + std::to_string(line) + " has " +
                                       std::to_string(row.size()) +
                                       " fields, expected " + std::to_string(ncol));
    }
    Index j = 0;
    for (std::size_t c = 0; c < ncol; ++c) {
      const auto& cell = row[c];
      if (c == target) {
        auto v = parse_number(cell);
        if (!v) {
          throw Error(ErrorKind::Data, "non-numeric target '" + cell + "' at line " +
                                           std::to_string(line));
        }
        ds.y(static_cast<Index>(r)) = *v;
        continue;
      }
      if (is_missing(cell)) {
        missing[static_cast<std::size_t>(j)].push_back(static_cast<Index>(r));
        ds.x(static_cast<Index>(r), j) = 0.0;
      } else {
        auto v = parse_number(cell);
        if (!v) {
          throw Error(ErrorKind::Data, "malformed value '" + cell + "' at line " +
                                           std::to_string(line) + ", column " +
                                           std::to_string(c + 1));
        }
        ds.x(static_cast<Index>(r), j) = *v;
      }
      ++j;
    }
  }

  // Mean imputation over the observed cells of each column.
  for (Index j = 0; j < d; ++j) {
    const auto& miss = missing[static_cast<std::size_t>(j)];
    if (miss.empty()) continue;
    const auto observed = static_cast<Index>(n) - static_cast<Index>(miss.size());
    if (observed == 0) {
      throw Error(ErrorKind::Data, "column '" + ds.feature_names[static_cast<std::size_t>(j)] +
                                       "' has no observed values");
    }
    const double mean = ds.x.col(j).sum() / static_cast<double>(observed);
    for (Index r : miss) ds.x(r, j) = mean;
    ds.imputed_cells += miss.size();
  }
  return ds;
}

TabularDataset load_csv(const std::filesystem::path& path, const CsvOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Data, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_csv(ss.str(), opts);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

TabularDataset minmax_normalize(const TabularDataset& ds,
                                std::vector<std::string>* constant_columns) {
  MinMaxNormalization norm{ds.x.colwise().minCoeff().transpose(),
                           ds.x.colwise().maxCoeff().transpose()};
  if (constant_columns) {
    for (Index j = 0; j < ds.d(); ++j) {
      if (!(norm.hi(j) > norm.lo(j))) {
        constant_columns->push_back(
            j < static_cast<Index>(ds.feature_names.size())
                ? ds.feature_names[static_cast<std::size_t>(j)]
                : "x" + std::to_string(j));
      }
    }
  }
  TabularDataset out = ds;
  out.x = minmax_apply(norm, ds.x);
  out.normalization = std::move(norm);
  return out;
}

Matrix minmax_apply(const MinMaxNormalization& norm, const Matrix& raw) {
  Matrix out(raw.rows(), raw.cols());
  for (Index j = 0; j < raw.cols(); ++j) {
    const double range = norm.hi(j) - norm.lo(j);
    if (range > 0.0) {
      out.col(j) = (raw.col(j).array() - norm.lo(j)) / range;
    } else {
      out.col(j).setZero();
    }
  }
  return out;
}

Matrix minmax_inverse(const MinMaxNormalization& norm, const Matrix& scaled) {
  Matrix out(scaled.rows(), scaled.cols());
  for (Index j = 0; j < scaled.cols(); ++j) {
    const double range = norm.hi(j) - norm.lo(j);
    out.col(j) = (scaled.col(j).array() * range + norm.lo(j)).matrix();
  }
  return out;
}

SplitIndices split_indices(std::size_t n, const SplitSpec& spec) {
  std::size_t ntr = 0;
  std::size_t nva = 0;
  std::size_t nte = 0;
  if (spec.fractions) {
    if (spec.train < 0 || spec.val < 0 || spec.test < 0 ||
        spec.train + spec.val + spec.test > 1.0 + 1e-9) {
      throw Error(ErrorKind::Config, "split fractions must be >= 0 and sum to <= 1");
    }
    const double nd = static_cast<double>(n);
    ntr = static_cast<std::size_t>(std::llround(spec.train * nd));
    nva = static_cast<std::size_t>(std::llround(spec.val * nd));
    ntr = std::min(ntr, n);
    nva = std::min(nva, n - ntr);
    if (std::abs(spec.train + spec.val + spec.test - 1.0) <= 1e-9) {
      nte = n - ntr - nva;
    } else {
      nte = std::min(static_cast<std::size_t>(std::llround(spec.test * nd)), n - ntr - nva);
    }
  } else {
    auto as_count = [](double v, const char* what) {
      if (v < 0 || v != std::floor(v)) {
        throw Error(ErrorKind::Config, std::string("split count for ") + what +
                                           " must be a non-negative integer");
      }
      return static_cast<std::size_t>(v);
    };
    ntr = as_count(spec.train, "train");
    nva = as_count(spec.val, "val");
    nte = as_count(spec.test, "test");
    if (ntr + nva + nte != n) {
      throw Error(ErrorKind::Config,
                  "split counts " + std::to_string(ntr) + "+" + std::to_string(nva) +
                      "+" + std::to_string(nte) + " do not sum to dataset size " +
                      std::to_string(n));
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (!spec.ordered) {
    Rng rng(spec.seed);
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.uniform_index(i)]);
  }
  SplitIndices out;
  out.train.assign(order.begin(), order.begin() + static_cast<long>(ntr));
  out.val.assign(order.begin() + static_cast<long>(ntr),
                 order.begin() + static_cast<long>(ntr + nva));
  out.test.assign(order.begin() + static_cast<long>(ntr + nva),
                  order.begin() + static_cast<long>(ntr + nva + nte));
  return out;
}

TabularDataset take_rows(const TabularDataset& ds, const std::vector<std::size_t>& rows) {
  TabularDataset out;
  out.feature_names = ds.feature_names;
  out.normalization = ds.normalization;
  out.x.resize(static_cast<Index>(rows.size()), ds.d());
  out.y.resize(static_cast<Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out.x.row(static_cast<Index>(k)) = ds.x.row(static_cast<Index>(rows[k]));
    out.y(static_cast<Index>(k)) = ds.y(static_cast<Index>(rows[k]));
  }
  return out;
}

DatasetSplits split(const TabularDataset& ds, const SplitSpec& spec) {
  const auto idx = split_indices(static_cast<std::size_t>(ds.n()), spec);
  return {take_rows(ds, idx.train), take_rows(ds, idx.val), take_rows(ds, idx.test)};
}

DatasetDescriptor parse_descriptor(const std::string& json_text,
                                   const std::filesystem::path& base_dir) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, std::string("descriptor is not valid JSON: ") + e.what());
  }
  try {
    DatasetDescriptor d;
    d.name = j.value("name", std::string{});
    std::filesystem::path p = j.at("path").get<std::string>();
    d.path = p.is_absolute() ? p : base_dir / p;
    const auto delim = j.value("delimiter", std::string{","});
    if (delim == "whitespace") {
      d.csv.delimiter = std::nullopt;
    } else if (delim == "tab" || delim == "\t") {
      d.csv.delimiter = '\t';
    } else if (delim.size() == 1) {
      d.csv.delimiter = delim[0];
    } else {
      throw Error(ErrorKind::Config, "unsupported delimiter '" + delim + "'");
    }
    d.csv.header = j.value("header", true);
    if (j.contains("target")) {
      const auto& t = j.at("target");
      if (t.is_string()) {
        d.csv.target = t.get<std::string>();
      } else {
        d.csv.target = t.get<int>();
      }
    }
    const auto norm = j.value("normalize", std::string{"minmax"});
    if (norm != "minmax" && norm != "none") {
      throw Error(ErrorKind::Config, "normalize must be 'minmax' or 'none'");
    }
    d.minmax = norm == "minmax";
    if (j.contains("feature_names")) {
      d.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    }
    if (j.contains("split")) {
      const auto& s = j.at("split");
      d.split.train = s.at("train").get<double>();
      d.split.val = s.at("val").get<double>();
      d.split.test = s.at("test").get<double>();
      // Integers are counts; anything else is a fraction of n.
      d.split.fractions = !(s.at("train").is_number_integer() &&
                            s.at("val").is_number_integer() &&
                            s.at("test").is_number_integer());
      d.split.seed = s.value("seed", std::uint64_t{0});
      d.split.ordered = s.value("ordered", false);
    }
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, std::string("bad descriptor field: ") + e.what());
  }
}

DatasetDescriptor load_descriptor(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorKind::Config, "cannot open descriptor " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_descriptor(ss.str(), file.parent_path());
}

DatasetSplits load_splits(const DatasetDescriptor& desc) {
  TabularDataset ds = load_csv(desc.path, desc.csv);
  if (!desc.feature_names.empty()) {
    if (desc.feature_names.size() != static_cast<std::size_t>(ds.d())) {
      throw Error(ErrorKind::Config, "descriptor lists " +
                                         std::to_string(desc.feature_names.size()) +
                                         " feature names for " + std::to_string(ds.d()) +
                                         " features");
    }
    ds.feature_names = desc.feature_names;
  }
  if (desc.minmax) {
    std::vector<std::string> constant;
    ds = minmax_normalize(ds, &constant);
    for (const auto& c : constant) {
      std::cerr << "warning: " << desc.path.string() << ": feature '" << c
                << "' is constant and was mapped to 0\n";
    }
  }
  return split(ds, desc.split);
}

}  // namespace ada
