// Command-line runner for anchor data augmentation experiments.
//
//   ada_cli fit configs/cosine_ada.json
//   ada_cli bench configs/cosine_ada.json --threads 4
//   ada_cli sweep configs/cosine_ada.json --param alpha --values 1.5,2,5,10
//   ada_cli augment configs/scatter_small.json
//   ada_cli plot-data --kind sweep_lines --inputs results/cos_sweep.csv
//   ada_cli generate configs/linear_ridge_ada.json
//   ada_cli verify results/cos.json configs/cosine_ada.json
//
// Exit codes: 0 ok, 1 configuration error, 2 data error, 3 every seed diverged.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ada/experiment.hpp"
#include "ada/kernels.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kConfig = 1, kData = 2, kDiverged = 3 };

struct Globals {
  std::optional<std::uint64_t> seed;
  std::vector<std::uint64_t> seeds;
  std::optional<std::string> out;
  int threads = 0;
  std::vector<std::string> overrides;
};

// "model.epochs=50" sets /model/epochs; the value is parsed as JSON when it
// can be, otherwise kept as a string.
void apply_override(json& j, const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ada::Error(ada::ErrorKind::Config, "--set expects key=value, got '" + kv + "'");
  }
  std::string pointer = "/" + kv.substr(0, eq);
  for (auto& c : pointer) {
    if (c == '.') c = '/';
  }
  const std::string raw = kv.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  j[json::json_pointer(pointer)] = value;
}

ada::ExperimentConfig load(const fs::path& file, const Globals& g) {
  std::ifstream in(file);
  if (!in) throw ada::Error(ada::ErrorKind::Config, "cannot open config " + file.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) {
    throw ada::Error(ada::ErrorKind::Config, file.string() + " is not valid JSON");
  }
  for (const auto& kv : g.overrides) apply_override(j, kv);
  if (!g.seeds.empty()) j["seeds"] = g.seeds;
  if (g.seed) j["seeds"] = std::vector<std::uint64_t>{*g.seed};
  if (g.out) j["outputs"] = *g.out;
  return ada::config_from_json(j, file.parent_path());
}

void print_summary(const std::string& label, const ada::ExperimentResult& r) {
  std::cout << std::left << std::setw(12) << label << std::right << std::setprecision(5)
            << " mse " << std::setw(10) << r.mean.mse << " +- " << std::setw(10) << r.sd.mse
            << "  rmse " << std::setw(10) << r.mean.rmse << " +- " << std::setw(10)
            << r.sd.rmse << "  mape " << std::setw(9) << r.mean.mape << " +- "
            << std::setw(9) << r.sd.mape << "  seeds " << r.n_ok << "/" << r.per_seed.size()
            << "  " << std::setprecision(3) << r.wall_time << "s\n";
  for (const auto& s : r.per_seed) {
    if (s.diverged) std::cerr << "seed " << s.seed << " diverged: " << s.divergence_message << '\n';
  }
}

std::ostream& open_or_stdout(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  file.open(p);
  if (!file) throw ada::Error(ada::ErrorKind::Data, "cannot write " + path);
  return file;
}

int cmd_fit(const fs::path& config, const Globals& g) {
  const auto cfg = load(config, g);
  const auto res = ada::run_experiment(cfg);
  const auto path = ada::write_results(cfg, res);
  print_summary(cfg.name, res);
  std::cout << "config " << res.config_hash << " -> " << path.string() << '\n';
  return res.all_diverged() ? kDiverged : kOk;
}

// Runs the configured method next to the same setup without augmentation.
int cmd_bench(const fs::path& config, const Globals& g) {
  const auto cfg = load(config, g);
  auto base = cfg;
  base.method = ada::NoMethod{};
  base.name = cfg.name + "_baseline";
  const auto rb = ada::run_experiment(base);
  const auto rm = ada::run_experiment(cfg);
  ada::write_results(base, rb);
  ada::write_results(cfg, rm);
  print_summary("baseline", rb);
  print_summary("method", rm);
  if (!rb.all_diverged() && !rm.all_diverged()) {
    std::cout << "relative mse change " << std::setprecision(4)
              << 100.0 * (rm.mean.mse - rb.mean.mse) / rb.mean.mse << "%\n";
  }
  return rm.all_diverged() ? kDiverged : kOk;
}

std::vector<double> parse_values(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  for (std::string tok; std::getline(ss, tok, ',');) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ada::Error(ada::ErrorKind::Config, "bad sweep value '" + tok + "'");
    }
  }
  if (out.empty()) throw ada::Error(ada::ErrorKind::Config, "--values is empty");
  return out;
}

int cmd_sweep(const fs::path& config, const std::string& param, const std::string& values,
              const std::string& csv, const Globals& g) {
  const auto cfg = load(config, g);
  const auto p = ada::parse_sweep_parameter(param);
  const auto vals = parse_values(values);
  const auto results = ada::sweep(cfg, p, vals);
  const fs::path out = csv.empty() ? cfg.outputs / (cfg.name + "_sweep.csv") : fs::path(csv);
  ada::append_sweep_csv(out, p, vals, results);
  bool all_diverged = true;
  for (std::size_t k = 0; k < vals.size(); ++k) {
    std::ostringstream label;
    label << ada::to_string(p) << "=" << vals[k];
    print_summary(label.str(), results[k]);
    all_diverged = all_diverged && results[k].all_diverged();
  }
  std::cout << "sweep rows -> " << out.string() << '\n';
  return all_diverged ? kDiverged : kOk;
}

int cmd_plot(const std::string& kind, const std::string& config,
             const std::vector<std::string>& inputs, std::size_t points,
             const std::string& out, const Globals& g) {
  const auto k = ada::parse_plot_kind(kind);
  ada::ExperimentConfig cfg;
  if (!config.empty()) {
    cfg = load(config, g);
  } else if (k != ada::PlotKind::SweepLines) {
    throw ada::Error(ada::ErrorKind::Config, kind + " needs --config");
  }
  std::vector<fs::path> in(inputs.begin(), inputs.end());
  std::ofstream file;
  ada::emit_plot_points(k, cfg, in, open_or_stdout(out, file), points);
  return kOk;
}

int cmd_augment(const fs::path& config, const std::string& out, const Globals& g) {
  const auto cfg = load(config, g);
  std::ofstream file;
  ada::emit_plot_points(ada::PlotKind::AugmentedScatter, cfg, {}, open_or_stdout(out, file));
  return kOk;
}

void write_split(const fs::path& p, const ada::CenteredDataset& ds) {
  const auto [x, y] = ada::uncenter(ds);
  std::ofstream f(p);
  if (!f) throw ada::Error(ada::ErrorKind::Data, "cannot write " + p.string());
  f << std::setprecision(17);
  for (ada::Index j = 0; j < x.cols(); ++j) f << 'x' << j << ',';
  f << "y\n";
  for (ada::Index i = 0; i < x.rows(); ++i) {
    for (ada::Index j = 0; j < x.cols(); ++j) f << x(i, j) << ',';
    f << y(i) << '\n';
  }
}

// Dumps the generated splits of every seed as CSV readable by the loader.
int cmd_generate(const fs::path& config, const Globals& g) {
  const auto cfg = load(config, g);
  fs::create_directories(cfg.outputs);
  for (auto seed : cfg.seeds) {
    const auto data = ada::prepare_data(cfg.dataset, seed);
    const std::string stem = cfg.name + "_seed" + std::to_string(seed);
    write_split(cfg.outputs / (stem + "_train.csv"), data.train);
    if (data.val.n() > 0) write_split(cfg.outputs / (stem + "_val.csv"), data.val);
    write_split(cfg.outputs / (stem + "_test.csv"), data.test);
    std::cout << (cfg.outputs / stem).string() << "_{train,val,test}.csv\n";
  }
  return kOk;
}

int cmd_verify(const fs::path& results, const fs::path& config, const Globals& g) {
  const auto cfg = load(config, g);
  const auto h = ada::verify_results(results, cfg);
  if (h.ok) {
    std::cout << "ok " << h.stored << '\n';
    return kOk;
  }
  std::cerr << h.message << '\n';
  return kConfig;
}

int exit_code(ada::ErrorKind k) {
  switch (k) {
    case ada::ErrorKind::Config: return kConfig;
    case ada::ErrorKind::Divergence: return kDiverged;
    default: return kData;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anchor data augmentation experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Run a single seed instead of the configured list");
  app.add_option("--seeds", g.seeds, "Replace the configured seed list");
  app.add_option("--out", g.out, "Output directory (overrides the config)");
  app.add_option("--threads", g.threads, "OpenMP threads (0 keeps the runtime default)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--set", g.overrides, "Override a config entry, e.g. model.epochs=50");

  std::string config, config2, param, values, out, kind, results;
  std::vector<std::string> inputs;
  std::size_t points = 200;

  auto* fit = app.add_subcommand("fit", "Train and evaluate every seed, write results");
  fit->add_option("config", config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);

  auto* bench = app.add_subcommand("bench", "Compare the configured method against no augmentation");
  bench->add_option("config", config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);

  auto* sw = app.add_subcommand("sweep", "Sweep alpha, q or n_aug");
  sw->add_option("config", config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  sw->add_option("--param", param, "alpha | q | n_aug")->required();
  sw->add_option("--values", values, "Comma-separated values")->required();
  sw->add_option("--csv", out, "Sweep CSV to append to (default <out>/<name>_sweep.csv)");

  auto* aug = app.add_subcommand("augment", "Write the augmented training set as scatter CSV");
  aug->add_option("config", config, "Experiment config with an ADA method")->required()->check(CLI::ExistingFile);
  aug->add_option("-o,--output", out, "Output file (default stdout)");

  auto* plot = app.add_subcommand("plot-data", "Emit plot-ready CSV");
  plot->add_option("--kind", kind, "fit_curve | augmented_scatter | sweep_lines")->required();
  plot->add_option("--config", config, "Experiment config")->check(CLI::ExistingFile);
  plot->add_option("--inputs", inputs, "Sweep CSV files")->check(CLI::ExistingFile);
  plot->add_option("--points", points, "Grid points for fit_curve");
  plot->add_option("-o,--output", out, "Output file (default stdout)");

  auto* gen = app.add_subcommand("generate", "Dump the dataset splits of each seed as CSV");
  gen->add_option("config", config, "Experiment config")->required()->check(CLI::ExistingFile);

  auto* ver = app.add_subcommand("verify", "Check a results file against a config");
  ver->add_option("results", results, "Results JSON")->required()->check(CLI::ExistingFile);
  ver->add_option("config", config2, "Experiment config")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (g.threads > 0) ada::kernels::set_threads(g.threads);
    if (*fit) return cmd_fit(config, g);
    if (*bench) return cmd_bench(config, g);
    if (*sw) return cmd_sweep(config, param, values, out, g);
    if (*aug) return cmd_augment(config, out, g);
    if (*plot) return cmd_plot(kind, config, inputs, points, out, g);
    if (*gen) return cmd_generate(config, g);
    if (*ver) return cmd_verify(results, config2, g);
  } catch (const ada::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
  return kOk;
}
