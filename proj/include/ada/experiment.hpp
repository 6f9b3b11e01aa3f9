#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "ada/augment.hpp"
#include "ada/datagen.hpp"
#include "ada/ingest.hpp"
#include "ada/metrics.hpp"
#include "ada/mlp.hpp"
#include "ada/partition.hpp"

namespace ada {

struct CosineDataset {
  CosineConfig cfg;
  std::size_t n_val = 100;
  std::size_t n_test = 500;
};

struct LinearScmDataset {
  LinearScmConfig cfg;
  std::size_t n_val = 0;
  std::size_t n_test = 1000;
};

struct CsvDataset {
  std::filesystem::path descriptor;
};

using DatasetSpec = std::variant<CosineDataset, LinearScmDataset, CsvDataset>;

enum class PartitionKind { KMeans, EqualWidth, EqualSize };

struct NoMethod {};

struct AdaMethod {
  double alpha = 2.0;
  std::size_t q = 8;
  PartitionKind partition = PartitionKind::KMeans;
  // Offline: expand the training set over a gamma grid with n_aug extra
  // copies per sample. Otherwise gamma is drawn per minibatch (MLP only).
  bool offline = false;
  std::size_t n_aug = 10;
  bool cluster_on_target = false;
  std::size_t bin_feature = 0;  // feature used by the binning schemes
  std::size_t kmeans_restarts = 10;
};

struct CMixupMethod {
  CMixupConfig cfg;
};

struct MixupMethod {
  MixupConfig cfg;
};

using MethodSpec = std::variant<NoMethod, AdaMethod, CMixupMethod, MixupMethod>;

struct OlsModel {};
struct RidgeModel {
  double lambda = 1.0;
};
struct MlpModel {
  MLPConfig cfg;
};

using ModelSpec = std::variant<OlsModel, RidgeModel, MlpModel>;

struct ExperimentConfig {
  std::string name = "experiment";
  DatasetSpec dataset = CosineDataset{};
  MethodSpec method = NoMethod{};
  ModelSpec model = OlsModel{};
  std::vector<std::uint64_t> seeds{0};
  std::filesystem::path outputs = "results";
};

// JSON round trip. Relative descriptor paths resolve against base_dir.
nlohmann::json to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const nlohmann::json& j,
                                  const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& file);

// Stable 64-bit FNV-1a hash (hex) of the canonical config JSON, excluding the
// output directory.
std::string config_hash(const ExperimentConfig& cfg);

struct SeedResult {
  std::uint64_t seed = 0;
  Metrics metrics;
  bool diverged = false;
  std::string divergence_message;
  std::size_t train_rows = 0;
  double wall_time = 0.0;
};

struct ExperimentResult {
  std::string config_hash;
  std::vector<SeedResult> per_seed;  // sorted by seed
  Metrics mean;
  Metrics sd;  // population standard deviation over non-diverged seeds
  std::size_t n_ok = 0;
  double wall_time = 0.0;

  bool all_diverged() const { return !per_seed.empty() && n_ok == 0; }
};

// Data for one seed, centered on the training split.
struct PreparedData {
  CenteredDataset train;
  CenteredDataset val;
  CenteredDataset test;
  Vector test_y_raw;
};

PreparedData prepare_data(const DatasetSpec& spec, std::uint64_t seed);

AnchorAssignment build_assignment(const AdaMethod& m, const Matrix& x,
                                  const Vector& y, std::uint64_t seed);

SeedResult run_seed(const ExperimentConfig& cfg, std::uint64_t seed);

/// Trains and evaluates every seed (seeds may run concurrently; each is
/// single-threaded internally) and aggregates over the non-diverged ones.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

nlohmann::json results_to_json(const ExperimentConfig& cfg,
                               const ExperimentResult& res);

// Writes <outputs>/<name>.json and appends per-seed rows to
// <outputs>/<name>_seeds.csv. Returns the JSON path.
std::filesystem::path write_results(const ExperimentConfig& cfg,
                                    const ExperimentResult& res);

struct HashCheck {
  bool ok = false;
  std::string stored;
  std::string expected;
  std::string message;
};

// Compares the hash recorded in a results file with the hash of `cfg`, and
// with the hash of the config embedded in the file.
HashCheck verify_results(const std::filesystem::path& results_file,
                         const ExperimentConfig& cfg);

enum class SweepParameter { Alpha, Q, NAug };

SweepParameter parse_sweep_parameter(const std::string& name);
std::string to_string(SweepParameter p);

ExperimentConfig with_parameter(const ExperimentConfig& cfg, SweepParameter p,
                                double value);

std::vector<ExperimentResult> sweep(const ExperimentConfig& cfg, SweepParameter p,
                                    const std::vector<double>& values);

inline constexpr const char* kSweepHeader = "parameter,value,seed,metric,metric_value";
inline constexpr const char* kScatterHeader = "source_index,group,gamma,x,y,x_aug,y_aug";

// Appends tidy rows (one per seed and metric); writes the header for new files.
void append_sweep_csv(const std::filesystem::path& file, SweepParameter p,
                      const std::vector<double>& values,
                      const std::vector<ExperimentResult>& results);

struct ScatterRow {
  std::size_t source_index = 0;
  std::size_t group = 0;
  double gamma = 1.0;
  double x = 0.0;
  double y = 0.0;
  double x_aug = 0.0;
  double y_aug = 0.0;
};

// One row per (gamma, sample), grid-major, for feature column `feature`.
std::vector<ScatterRow> augmented_scatter(const Matrix& x, const Vector& y,
                                          const AnchorAssignment& assignment,
                                          const GammaGrid& grid,
                                          std::size_t feature = 0);

void write_scatter_csv(std::ostream& os, const std::vector<ScatterRow>& rows);

enum class PlotKind { FitCurve, AugmentedScatter, SweepLines };

PlotKind parse_plot_kind(const std::string& s);

/// Plot-ready long-format CSV.
///  - AugmentedScatter: the training data of cfg's first seed under its ADA
///    method, over the method's gamma grid.
///  - FitCurve: per seed, model predictions on `grid_points` evenly spaced
///    inputs spanning a 1-D dataset (columns seed,x,y_pred,y_true).
///  - SweepLines: mean and SD per (parameter, value, metric) over the sweep CSV
///    files in `inputs`.
void emit_plot_points(PlotKind kind, const ExperimentConfig& cfg,
                      const std::vector<std::filesystem::path>& inputs,
                      std::ostream& os, std::size_t grid_points = 200);

}  // namespace ada
