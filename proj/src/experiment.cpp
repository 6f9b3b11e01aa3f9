#include "ada/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "ada/linear.hpp"

namespace ada {

using nlohmann::json;

namespace {

const char* to_string(PartitionKind k) {
  switch (k) {
    case PartitionKind::KMeans: return "kmeans";
    case PartitionKind::EqualWidth: return "equal_width";
    case PartitionKind::EqualSize: return "equal_size";
  }
  return "kmeans";
}

PartitionKind parse_partition(const std::string& s) {
  if (s == "kmeans") return PartitionKind::KMeans;
  if (s == "equal_width") return PartitionKind::EqualWidth;
  if (s == "equal_size") return PartitionKind::EqualSize;
  throw Error(ErrorKind::Config, "unknown partition kind '" + s + "'");
}

json mlp_to_json(const MLPConfig& c) {
  return json{{"layers", c.layer_widths},
              {"activation", c.activation == Activation::ReLU ? "relu" : "sigmoid"},
              {"lr", c.learning_rate},
              {"epochs", c.epochs},
              {"batch_size", c.batch_size},
              {"optimizer", c.optimizer == OptimizerKind::Adam ? "adam" : "sgd"}};
}

MLPConfig mlp_from_json(const json& j) {
  MLPConfig c;
  c.layer_widths = j.value("layers", c.layer_widths);
  const auto act = j.value("activation", std::string{"relu"});
  if (act == "relu") {
    c.activation = Activation::ReLU;
  } else if (act == "sigmoid") {
    c.activation = Activation::Sigmoid;
  } else {
    throw Error(ErrorKind::Config, "unknown activation '" + act + "'");
  }
  c.learning_rate = j.value("lr", c.learning_rate);
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  const auto opt = j.value("optimizer", std::string{"adam"});
  if (opt == "adam") {
    c.optimizer = OptimizerKind::Adam;
  } else if (opt == "sgd") {
    c.optimizer = OptimizerKind::SGD;
  } else {
    throw Error(ErrorKind::Config, "unknown optimizer '" + opt + "'");
  }
  validate(c);
  return c;
}

std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

Metrics metric_mean(const std::vector<Metrics>& ms) {
  Metrics m;
  for (const auto& v : ms) {
    m.mse += v.mse;
    m.rmse += v.rmse;
    m.mape += v.mape;
  }
  const double k = static_cast<double>(ms.size());
  m.mse /= k;
  m.rmse /= k;
  m.mape /= k;
  return m;
}

Metrics metric_sd(const std::vector<Metrics>& ms, const Metrics& mean) {
  Metrics s;
  for (const auto& v : ms) {
    s.mse += (v.mse - mean.mse) * (v.mse - mean.mse);
    s.rmse += (v.rmse - mean.rmse) * (v.rmse - mean.rmse);
    s.mape += (v.mape - mean.mape) * (v.mape - mean.mape);
  }
  const double k = static_cast<double>(ms.size());
  s.mse = std::sqrt(s.mse / k);
  s.rmse = std::sqrt(s.rmse / k);
  s.mape = std::sqrt(s.mape / k);
  return s;
}

json metrics_json(const Metrics& m) {
  return json{{"mse", m.mse}, {"rmse", m.rmse}, {"mape", m.mape}};
}

}  // namespace

json to_json(const ExperimentConfig& cfg) {
  json j;
  j["name"] = cfg.name;
  j["seeds"] = cfg.seeds;
  j["outputs"] = cfg.outputs.string();

  std::visit(
      [&](const auto& d) {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, CosineDataset>) {
          j["dataset"] = json{{"kind", "cosine"},
                              {"n", d.cfg.n},
                              {"x_lo", d.cfg.x_lo},
                              {"x_hi", d.cfg.x_hi},
                              {"angular_freq", d.cfg.angular_freq},
                              {"noise_sd", d.cfg.noise_sd},
                              {"grid", d.cfg.grid},
                              {"n_val", d.n_val},
                              {"n_test", d.n_test}};
        } else if constexpr (std::is_same_v<D, LinearScmDataset>) {
          j["dataset"] = json{{"kind", "linear_scm"},
                              {"n", d.cfg.n},
                              {"d", d.cfg.d},
                              {"groups", d.cfg.groups},
                              {"shift", d.cfg.anchor_shift_strength},
                              {"noise_sd", d.cfg.noise_sd},
                              {"coef_sd", d.cfg.coef_sd},
                              {"n_val", d.n_val},
                              {"n_test", d.n_test}};
        } else {
          j["dataset"] = json{{"kind", "csv"}, {"descriptor", d.descriptor.string()}};
        }
      },
      cfg.dataset);

  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, NoMethod>) {
          j["method"] = json{{"kind", "none"}};
        } else if constexpr (std::is_same_v<M, AdaMethod>) {
          j["method"] = json{{"kind", "ada"},
                             {"alpha", m.alpha},
                             {"q", m.q},
                             {"partition", to_string(m.partition)},
                             {"mode", m.offline ? "offline" : "minibatch"},
                             {"n_aug", m.n_aug},
                             {"cluster_on_target", m.cluster_on_target},
                             {"bin_feature", m.bin_feature},
                             {"kmeans_restarts", m.kmeans_restarts}};
        } else if constexpr (std::is_same_v<M, CMixupMethod>) {
          j["method"] = json{{"kind", "cmixup"},
                             {"bandwidth", m.cfg.bandwidth},
                             {"beta", m.cfg.beta_param}};
        } else {
          j["method"] = json{{"kind", "mixup"}, {"beta", m.cfg.beta_param}};
        }
      },
      cfg.method);

  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, OlsModel>) {
          j["model"] = json{{"kind", "ols"}};
        } else if constexpr (std::is_same_v<M, RidgeModel>) {
          j["model"] = json{{"kind", "ridge"}, {"lambda", m.lambda}};
        } else {
          auto mj = mlp_to_json(m.cfg);
          mj["kind"] = "mlp";
          j["model"] = mj;
        }
      },
      cfg.model);
  return j;
}

ExperimentConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
  try {
    ExperimentConfig cfg;
    cfg.name = j.value("name", cfg.name);
    cfg.seeds = j.value("seeds", cfg.seeds);
    if (cfg.seeds.empty()) throw Error(ErrorKind::Config, "seeds must be non-empty");
    cfg.outputs = j.value("outputs", cfg.outputs.string());

    const auto& d = j.at("dataset");
    const auto dkind = d.at("kind").get<std::string>();
    if (dkind == "cosine") {
      CosineDataset c;
      c.cfg.n = d.value("n", c.cfg.n);
      c.cfg.x_lo = d.value("x_lo", c.cfg.x_lo);
      c.cfg.x_hi = d.value("x_hi", c.cfg.x_hi);
      c.cfg.angular_freq = d.value("angular_freq", c.cfg.angular_freq);
      c.cfg.noise_sd = d.value("noise_sd", c.cfg.noise_sd);
      c.cfg.grid = d.value("grid", c.cfg.grid);
      c.n_val = d.value("n_val", c.n_val);
      c.n_test = d.value("n_test", c.n_test);
      cfg.dataset = c;
    } else if (dkind == "linear_scm") {
      LinearScmDataset l;
      l.cfg.n = d.value("n", l.cfg.n);
      l.cfg.d = d.value("d", l.cfg.d);
      l.cfg.groups = d.value("groups", l.cfg.groups);
      l.cfg.anchor_shift_strength = d.value("shift", l.cfg.anchor_shift_strength);
      l.cfg.noise_sd = d.value("noise_sd", l.cfg.noise_sd);
      l.cfg.coef_sd = d.value("coef_sd", l.cfg.coef_sd);
      l.n_val = d.value("n_val", l.n_val);
      l.n_test = d.value("n_test", l.n_test);
      cfg.dataset = l;
    } else if (dkind == "csv") {
      std::filesystem::path p = d.at("descriptor").get<std::string>();
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      cfg.dataset = CsvDataset{p};
    } else {
      throw Error(ErrorKind::Config, "unknown dataset kind '" + dkind + "'");
    }

    const json m = j.value("method", json{{"kind", "none"}});
    const auto mkind = m.at("kind").get<std::string>();
    if (mkind == "none") {
      cfg.method = NoMethod{};
    } else if (mkind == "ada") {
      AdaMethod a;
      a.alpha = m.value("alpha", a.alpha);
      a.q = m.value("q", a.q);
      a.partition = parse_partition(m.value("partition", std::string{"kmeans"}));
      const auto mode = m.value("mode", std::string{"minibatch"});
      if (mode != "offline" && mode != "minibatch") {
        throw Error(ErrorKind::Config, "ADA mode must be 'offline' or 'minibatch'");
      }
      a.offline = mode == "offline";
      a.n_aug = m.value("n_aug", a.n_aug);
      a.cluster_on_target = m.value("cluster_on_target", a.cluster_on_target);
      a.bin_feature = m.value("bin_feature", a.bin_feature);
      a.kmeans_restarts = m.value("kmeans_restarts", a.kmeans_restarts);
      GammaPrior check(a.alpha);
      (void)check;
      if (a.offline) (void)gamma_grid(a.alpha, a.n_aug);
      cfg.method = a;
    } else if (mkind == "cmixup") {
      CMixupMethod c;
      c.cfg.bandwidth = m.value("bandwidth", c.cfg.bandwidth);
      c.cfg.beta_param = m.value("beta", c.cfg.beta_param);
      cfg.method = c;
    } else if (mkind == "mixup") {
      MixupMethod x;
      x.cfg.beta_param = m.value("beta", x.cfg.beta_param);
      cfg.method = x;
    } else {
      throw Error(ErrorKind::Config, "unknown method kind '" + mkind + "'");
    }

    const json mo = j.value("model", json{{"kind", "ols"}});
    const auto okind = mo.at("kind").get<std::string>();
    if (okind == "ols") {
      cfg.model = OlsModel{};
    } else if (okind == "ridge") {
      cfg.model = RidgeModel{mo.value("lambda", 1.0)};
    } else if (okind == "mlp") {
      cfg.model = MlpModel{mlp_from_json(mo)};
    } else {
      throw Error(ErrorKind::Config, "unknown model kind '" + okind + "'");
    }

    const bool linear = !std::holds_alternative<MlpModel>(cfg.model);
    if (linear) {
      const auto* ada = std::get_if<AdaMethod>(&cfg.method);
      const bool mix = std::holds_alternative<CMixupMethod>(cfg.method) ||
                       std::holds_alternative<MixupMethod>(cfg.method);
      if (mix || (ada && !ada->offline)) {
        throw Error(ErrorKind::Config,
                    "closed-form models support only method none or offline ADA");
      }
    }
    return cfg;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, std::string("bad experiment config: ") + e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorKind::Config, "cannot open config " + file.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, file.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(j, file.parent_path());
}

std::string config_hash(const ExperimentConfig& cfg) {
  json j = to_json(cfg);
  j.erase("outputs");
  return fnv1a_hex(j.dump());
}

PreparedData prepare_data(const DatasetSpec& spec, std::uint64_t seed) {
  Rng root(seed);
  return std::visit(
      [&](const auto& d) -> PreparedData {
        using D = std::decay_t<decltype(d)>;
        PreparedData p;
        if constexpr (std::is_same_v<D, CosineDataset>) {
          auto c = d.cfg;
          c.seed = root.split(11).seed();
          const auto tr = gen_cosine(c);
          p.train = center_dataset(tr.x, tr.y);
          c.grid = false;
          if (d.n_val > 0) {
            c.n = d.n_val;
            c.seed = root.split(12).seed();
            const auto va = gen_cosine(c);
            p.val = center_like(p.train, va.x, va.y);
          }
          c.n = d.n_test;
          c.seed = root.split(13).seed();
          const auto te = gen_cosine(c);
          p.test = center_like(p.train, te.x, te.y);
          p.test_y_raw = te.y;
        } else if constexpr (std::is_same_v<D, LinearScmDataset>) {
          auto c = d.cfg;
          const std::size_t ntr = c.n;
          c.n = ntr + d.n_val + d.n_test;
          c.seed = seed;
          const auto all = gen_linear_scm(c);
          const auto tr_n = static_cast<Index>(ntr);
          const auto va_n = static_cast<Index>(d.n_val);
          const auto te_n = static_cast<Index>(d.n_test);
          p.train = center_dataset(all.x.topRows(tr_n), all.y.head(tr_n));
          if (va_n > 0) {
            p.val = center_like(p.train, all.x.middleRows(tr_n, va_n),
                                all.y.segment(tr_n, va_n));
          }
          p.test = center_like(p.train, all.x.bottomRows(te_n), all.y.tail(te_n));
          p.test_y_raw = all.y.tail(te_n);
        } else {
          const auto splits = load_splits(load_descriptor(d.descriptor));
          if (splits.train.n() == 0 || splits.test.n() == 0) {
            throw Error(ErrorKind::Data, "dataset split leaves train or test empty");
          }
          p.train = center_dataset(splits.train.x, splits.train.y);
          if (splits.val.n() > 0) p.val = center_like(p.train, splits.val.x, splits.val.y);
          p.test = center_like(p.train, splits.test.x, splits.test.y);
          p.test_y_raw = splits.test.y;
        }
        if (p.val.x.cols() == 0) {
          p.val.x.resize(0, p.train.d());
          p.val.y.resize(0);
        }
        return p;
      },
      spec);
}

AnchorAssignment build_assignment(const AdaMethod& m, const Matrix& x,
                                  const Vector& y, std::uint64_t seed) {
  switch (m.partition) {
    case PartitionKind::KMeans: {
      KMeansConfig kc;
      kc.q = m.q;
      kc.seed = seed;
      kc.n_init = m.kmeans_restarts;
      return kmeans(clustering_features(x, y, m.cluster_on_target), kc).assignment;
    }
    case PartitionKind::EqualWidth:
    case PartitionKind::EqualSize: {
      if (static_cast<Index>(m.bin_feature) >= x.cols()) {
        throw Error(ErrorKind::Config, "bin_feature out of range");
      }
      const Vector g = x.col(static_cast<Index>(m.bin_feature));
      if (m.partition == PartitionKind::EqualSize) return equal_size_bins(g, m.q);
      return equal_width_bins(g, m.q, g.minCoeff(),
                              std::max(g.maxCoeff(), g.minCoeff() + 1e-12));
    }
  }
  throw Error(ErrorKind::Config, "unknown partition kind");
}

namespace {

struct PreparedTraining {
  CenteredDataset train;
  AugmentationHook hook = NoHook{};
};

PreparedTraining apply_method(const ExperimentConfig& cfg, const CenteredDataset& base,
                              const Rng& root) {
  PreparedTraining t{base, NoHook{}};
  if (const auto* ada = std::get_if<AdaMethod>(&cfg.method)) {
    const auto assignment =
        build_assignment(*ada, base.x, base.y, root.split(21).seed());
    if (ada->offline) {
      auto aug = augment_dataset_offline(base.x, base.y, assignment,
                                         gamma_grid(ada->alpha, ada->n_aug));
      t.train.x = std::move(aug.x);
      t.train.y = std::move(aug.y);
    } else {
      t.hook = AdaHook{GammaPrior(ada->alpha), assignment};
    }
  } else if (const auto* cm = std::get_if<CMixupMethod>(&cfg.method)) {
    // Bandwidth is specified on standardized targets.
    CMixupConfig c = cm->cfg;
    const double sd = std::sqrt(base.y.squaredNorm() / static_cast<double>(base.n()));
    if (sd > 0.0) c.bandwidth *= sd;
    t.hook = CMixupHook{c};
  } else if (const auto* mx = std::get_if<MixupMethod>(&cfg.method)) {
    t.hook = MixupHook{mx->cfg};
  }
  return t;
}

// Fits cfg's model for one seed and predicts `query` (centered like the
// training data) on the original target scale.
Vector fit_and_predict(const ExperimentConfig& cfg, const PreparedData& data,
                       std::uint64_t seed, const Matrix& query,
                       std::size_t* train_rows = nullptr) {
  const Rng root(seed);
  const PreparedTraining t = apply_method(cfg, data.train, root);
  if (train_rows) *train_rows = static_cast<std::size_t>(t.train.n());
  Vector pred = std::visit(
      [&](const auto& m) -> Vector {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, OlsModel>) {
          return fit_ols(t.train.x, t.train.y).predict(query);
        } else if constexpr (std::is_same_v<M, RidgeModel>) {
          return fit_ridge(t.train.x, t.train.y, m.lambda).predict(query);
        } else {
          MLPConfig mc = m.cfg;
          mc.seed = root.split(31).seed();
          mc.hook = t.hook;
          return mlp_predict(mlp_train(mc, t.train, data.val).model, query);
        }
      },
      cfg.model);
  pred.array() += data.train.y_mean;
  if (!pred.allFinite()) throw TrainingDiverged("non-finite predictions", TrainReport{});
  return pred;
}

}  // namespace

SeedResult run_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  SeedResult r;
  r.seed = seed;
  const PreparedData data = prepare_data(cfg.dataset, seed);
  try {
    const Vector pred = fit_and_predict(cfg, data, seed, data.test.x, &r.train_rows);
    r.metrics = metrics(pred, data.test_y_raw);
  } catch (const TrainingDiverged& e) {
    r.diverged = true;
    r.divergence_message = e.what();
  }
  r.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  if (cfg.seeds.empty()) throw Error(ErrorKind::Config, "seeds must be non-empty");
  const auto start = std::chrono::steady_clock::now();
  ExperimentResult res;
  res.config_hash = config_hash(cfg);
  std::vector<std::uint64_t> seeds = cfg.seeds;
  std::sort(seeds.begin(), seeds.end());
  res.per_seed.resize(seeds.size());

  std::vector<std::exception_ptr> errors(seeds.size());
  const auto ns = static_cast<long>(seeds.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < ns; ++i) {
    try {
      res.per_seed[static_cast<std::size_t>(i)] =
          run_seed(cfg, seeds[static_cast<std::size_t>(i)]);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<Metrics> ok;
  for (const auto& s : res.per_seed) {
    if (!s.diverged) ok.push_back(s.metrics);
  }
  res.n_ok = ok.size();
  if (!ok.empty()) {
    res.mean = metric_mean(ok);
    res.sd = metric_sd(ok, res.mean);
  }
  res.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

json results_to_json(const ExperimentConfig& cfg, const ExperimentResult& res) {
  json j;
  j["config"] = to_json(cfg);
  j["config_hash"] = res.config_hash;
  json seeds = json::array();
  for (const auto& s : res.per_seed) {
    json sj = metrics_json(s.metrics);
    sj["seed"] = s.seed;
    sj["diverged"] = s.diverged;
    sj["train_rows"] = s.train_rows;
    if (s.diverged) sj["divergence"] = s.divergence_message;
    seeds.push_back(sj);
  }
  j["seeds"] = seeds;
  j["aggregate"] = json{{"mean", metrics_json(res.mean)},
                        {"sd", metrics_json(res.sd)},
                        {"n_ok", res.n_ok}};
  return j;
}

std::filesystem::path write_results(const ExperimentConfig& cfg,
                                    const ExperimentResult& res) {
  std::filesystem::create_directories(cfg.outputs);
  const auto json_path = cfg.outputs / (cfg.name + ".json");
  {
    std::ofstream out(json_path);
    if (!out) throw Error(ErrorKind::Data, "cannot write " + json_path.string());
    out << results_to_json(cfg, res).dump(2) << "\n";
  }
  const auto csv_path = cfg.outputs / (cfg.name + "_seeds.csv");
  const bool fresh = !std::filesystem::exists(csv_path);
  std::ofstream csv(csv_path, std::ios::app);
  if (!csv) throw Error(ErrorKind::Data, "cannot write " + csv_path.string());
  if (fresh) csv << "config_hash,seed,mse,rmse,mape,diverged\n";
  csv << std::setprecision(17);
  for (const auto& s : res.per_seed) {
    csv << res.config_hash << ',' << s.seed << ',' << s.metrics.mse << ','
        << s.metrics.rmse << ',' << s.metrics.mape << ',' << (s.diverged ? 1 : 0)
        << '\n';
  }
  return json_path;
}

HashCheck verify_results(const std::filesystem::path& results_file,
                         const ExperimentConfig& cfg) {
  std::ifstream in(results_file);
  if (!in) throw Error(ErrorKind::Data, "cannot open " + results_file.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Data, results_file.string() + ": " + e.what());
  }
  HashCheck h;
  h.stored = j.value("config_hash", std::string{});
  h.expected = config_hash(cfg);
  std::string embedded;
  if (j.contains("config")) {
    json c = j.at("config");
    c.erase("outputs");
    embedded = fnv1a_hex(c.dump());
  }
  if (h.stored != h.expected) {
    h.message = "config hash mismatch: file has " + h.stored + ", config gives " +
                h.expected;
  } else if (!embedded.empty() && embedded != h.stored) {
    h.message = "results file is inconsistent: embedded config hashes to " +
                embedded + " but file records " + h.stored;
  } else {
    h.ok = true;
  }
  return h;
}

SweepParameter parse_sweep_parameter(const std::string& name) {
  if (name == "alpha") return SweepParameter::Alpha;
  if (name == "q") return SweepParameter::Q;
  if (name == "n_aug") return SweepParameter::NAug;
  throw Error(ErrorKind::Config, "unknown sweep parameter '" + name + "'");
}

std::string to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::Alpha: return "alpha";
    case SweepParameter::Q: return "q";
    case SweepParameter::NAug: return "n_aug";
  }
  return "alpha";
}

ExperimentConfig with_parameter(const ExperimentConfig& cfg, SweepParameter p,
                                double value) {
  auto* ada = std::get_if<AdaMethod>(&cfg.method);
  if (!ada) throw Error(ErrorKind::Config, "sweeps need an ADA method");
  ExperimentConfig out = cfg;
  auto& a = std::get<AdaMethod>(out.method);
  auto as_count = [&](double v) {
    if (v < 1 || v != std::floor(v)) {
      throw Error(ErrorKind::Config, to_string(p) + " must be a positive integer");
    }
    return static_cast<std::size_t>(v);
  };
  switch (p) {
    case SweepParameter::Alpha:
      (void)GammaPrior(value);
      a.alpha = value;
      break;
    case SweepParameter::Q:
      a.q = as_count(value);
      break;
    case SweepParameter::NAug:
      a.n_aug = as_count(value);
      (void)gamma_grid(a.alpha, a.n_aug);
      break;
  }
  std::ostringstream name;
  name << cfg.name << "_" << to_string(p) << "_" << value;
  out.name = name.str();
  return out;
}

std::vector<ExperimentResult> sweep(const ExperimentConfig& cfg, SweepParameter p,
                                    const std::vector<double>& values) {
  if (values.empty()) throw Error(ErrorKind::Config, "sweep needs at least one value");
  std::vector<ExperimentResult> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(run_experiment(with_parameter(cfg, p, v)));
  return out;
}

void append_sweep_csv(const std::filesystem::path& file, SweepParameter p,
                      const std::vector<double>& values,
                      const std::vector<ExperimentResult>& results) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  const bool fresh = !std::filesystem::exists(file) || std::filesystem::file_size(file) == 0;
  std::ofstream out(file, std::ios::app);
  if (!out) throw Error(ErrorKind::Data, "cannot write " + file.string());
  if (fresh) out << kSweepHeader << '\n';
  out << std::setprecision(17);
  const auto name = to_string(p);
  for (std::size_t k = 0; k < values.size() && k < results.size(); ++k) {
    for (const auto& s : results[k].per_seed) {
      if (s.diverged) {
        out << name << ',' << values[k] << ',' << s.seed << ",diverged,1\n";
        continue;
      }
      out << name << ',' << values[k] << ',' << s.seed << ",mse," << s.metrics.mse << '\n';
      out << name << ',' << values[k] << ',' << s.seed << ",rmse," << s.metrics.rmse << '\n';
      out << name << ',' << values[k] << ',' << s.seed << ",mape," << s.metrics.mape << '\n';
    }
  }
}

std::vector<ScatterRow> augmented_scatter(const Matrix& x, const Vector& y,
                                          const AnchorAssignment& assignment,
                                          const GammaGrid& grid,
                                          std::size_t feature) {
  if (static_cast<Index>(feature) >= x.cols()) {
    throw Error(ErrorKind::Config, "scatter feature out of range");
  }
  const auto aug = augment_dataset_offline(x, y, assignment, grid);
  const auto col = static_cast<Index>(feature);
  std::vector<ScatterRow> rows;
  rows.reserve(aug.source_indices.size());
  for (std::size_t k = 0; k < aug.source_indices.size(); ++k) {
    const auto i = aug.source_indices[k];
    const auto ii = static_cast<Index>(i);
    rows.push_back(ScatterRow{i, assignment.label(i), aug.gammas[k], x(ii, col), y(ii),
                              aug.x(static_cast<Index>(k), col),
                              aug.y(static_cast<Index>(k))});
  }
  return rows;
}

void write_scatter_csv(std::ostream& os, const std::vector<ScatterRow>& rows) {
  os << kScatterHeader << '\n' << std::setprecision(17);
  for (const auto& r : rows) {
    os << r.source_index << ',' << r.group << ',' << r.gamma << ',' << r.x << ','
       << r.y << ',' << r.x_aug << ',' << r.y_aug << '\n';
  }
}

PlotKind parse_plot_kind(const std::string& s) {
  if (s == "fit_curve") return PlotKind::FitCurve;
  if (s == "augmented_scatter") return PlotKind::AugmentedScatter;
  if (s == "sweep_lines") return PlotKind::SweepLines;
  throw Error(ErrorKind::Config, "unknown plot kind '" + s + "'");
}

namespace {

void emit_scatter(const ExperimentConfig& cfg, std::ostream& os) {
  const auto* ada = std::get_if<AdaMethod>(&cfg.method);
  if (!ada) throw Error(ErrorKind::Config, "augmented_scatter needs an ADA method");
  const std::uint64_t seed = cfg.seeds.front();
  const auto data = prepare_data(cfg.dataset, seed);
  const auto [x, y] = uncenter(data.train);
  const auto assignment =
      build_assignment(*ada, data.train.x, data.train.y, Rng(seed).split(21).seed());
  write_scatter_csv(os, augmented_scatter(x, y, assignment,
                                          gamma_grid(ada->alpha, ada->n_aug)));
}

void emit_fit_curve(const ExperimentConfig& cfg, std::ostream& os,
                    std::size_t grid_points) {
  const auto* cos = std::get_if<CosineDataset>(&cfg.dataset);
  if (!cos) throw Error(ErrorKind::Config, "fit_curve supports the cosine dataset");
  if (grid_points < 2) throw Error(ErrorKind::Config, "fit_curve needs >= 2 points");
  os << "seed,x,y_pred,y_true\n" << std::setprecision(17);
  const auto g = static_cast<Index>(grid_points);
  Vector xs = Vector::LinSpaced(g, cos->cfg.x_lo, cos->cfg.x_hi);
  for (auto seed : cfg.seeds) {
    const auto data = prepare_data(cfg.dataset, seed);
    const Matrix query = (xs.array() - data.train.x_mean(0)).matrix();
    const Vector pred = fit_and_predict(cfg, data, seed, query);
    for (Index i = 0; i < g; ++i) {
      os << seed << ',' << xs(i) << ',' << pred(i) << ','
         << std::cos(cos->cfg.angular_freq * xs(i)) << '\n';
    }
  }
}

void emit_sweep_lines(const std::vector<std::filesystem::path>& inputs,
                      std::ostream& os) {
  if (inputs.empty()) throw Error(ErrorKind::Config, "sweep_lines needs sweep CSV inputs");
  std::map<std::tuple<std::string, double, std::string>, std::vector<double>> groups;
  for (const auto& p : inputs) {
    std::ifstream in(p);
    if (!in) throw Error(ErrorKind::Data, "cannot open " + p.string());
    std::string line;
    std::getline(in, line);
    if (line != kSweepHeader) {
      throw Error(ErrorKind::Data, p.string() + " is not a sweep CSV");
    }
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      if (line == kSweepHeader) continue;
      std::vector<std::string> f;
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) f.push_back(cell);
      if (f.size() != 5) {
        throw Error(ErrorKind::Data, p.string() + ": malformed line " + std::to_string(lineno));
      }
      if (f[3] == "diverged") continue;
      groups[{f[0], std::stod(f[1]), f[3]}].push_back(std::stod(f[4]));
    }
  }
  os << "parameter,value,metric,mean,sd,n\n" << std::setprecision(17);
  for (const auto& [key, vals] : groups) {
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= static_cast<double>(vals.size());
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / static_cast<double>(vals.size()));
    os << std::get<0>(key) << ',' << std::get<1>(key) << ',' << std::get<2>(key) << ','
       << mean << ',' << sd << ',' << vals.size() << '\n';
  }
}

}  // namespace

void emit_plot_points(PlotKind kind, const ExperimentConfig& cfg,
                      const std::vector<std::filesystem::path>& inputs,
                      std::ostream& os, std::size_t grid_points) {
  switch (kind) {
    case PlotKind::AugmentedScatter:
      emit_scatter(cfg, os);
      return;
    case PlotKind::FitCurve:
      emit_fit_curve(cfg, os, grid_points);
      return;
    case PlotKind::SweepLines:
      emit_sweep_lines(inputs, os);
      return;
  }
}

}  // namespace ada
