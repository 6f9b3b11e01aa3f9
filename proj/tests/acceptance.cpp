// Acceptance suite. Prints one PASS/FAIL line per criterion.
//
//   acceptance            run all criteria
//   acceptance --only 5   run a single criterion

#include <chrono>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "ada/augment.hpp"
#include "ada/experiment.hpp"
#include "ada/kernels.hpp"
#include "ada/linear.hpp"
#include "ada/mlp.hpp"
#include "ada/partition.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace ada;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

const fs::path kSource = ADA_SOURCE_DIR;

ExperimentConfig config(const std::string& file) { return load_config(kSource / "configs" / file); }

ExperimentConfig baseline_of(const ExperimentConfig& cfg) {
  auto b = cfg;
  b.method = NoMethod{};
  b.name = cfg.name + "_baseline";
  return b;
}

Matrix onehot(const std::vector<std::size_t>& labels, std::size_t q) {
  Matrix a = Matrix::Zero(static_cast<Index>(labels.size()), static_cast<Index>(q));
  for (std::size_t i = 0; i < labels.size(); ++i) a(static_cast<Index>(i), static_cast<Index>(labels[i])) = 1.0;
  return a;
}

Outcome projection_equivalence() {
  Stopwatch sw;
  Rng rng(1);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + rng.uniform_index(200);
    const std::size_t q = 1 + rng.uniform_index(10);
    const auto labels = oracle::random_labels(n, q, rng);
    const Matrix compact = projection_compact(AnchorAssignment(labels, q)).to_dense();
    const Matrix ref = oracle::projection_svd(onehot(labels, q));
    worst = std::max(worst, (compact - ref).cwiseAbs().maxCoeff());
  }
  const double s = sw.seconds();
  return {worst <= 1e-10 && s < 10.0,
          "max |compact - pinv| " + fmt(worst, 3) + " over 100 anchors, " + fmt(s, 3) + " s"};
}

Outcome anchor_regression_identity() {
  Stopwatch sw;
  Rng rng(2);
  double worst_grad = 0.0, worst_ols = 0.0;
  for (int t = 0; t < 100; ++t) {
    const auto n = static_cast<Index>(5 + rng.uniform_index(96));
    const auto d = static_cast<Index>(1 + rng.uniform_index(std::min<std::size_t>(5, static_cast<std::size_t>(n) - 2)));
    const std::size_t q = 1 + rng.uniform_index(8);
    const Matrix x = oracle::random_matrix(n, d, rng);
    const Vector y = oracle::random_vector(n, rng);
    const AnchorAssignment a(oracle::random_labels(static_cast<std::size_t>(n), q, rng), q);
    const double gamma = rng.uniform(0.0, 10.0);
    const auto fit = fit_anchor_regression(x, y, a, gamma);
    worst_grad = std::max(worst_grad, anchor_loss_gradient(fit, x, y, projection_compact(a), gamma).norm());
    const auto one = fit_anchor_regression(x, y, a, 1.0);
    const auto ols = fit_ols(x, y);
    worst_ols = std::max({worst_ols, (one.coef - ols.coef).cwiseAbs().maxCoeff(),
                          std::abs(one.intercept - ols.intercept)});
  }
  const double s = sw.seconds();
  return {worst_grad < 1e-6 && worst_ols <= 1e-10 && s < 10.0,
          "max gradient norm " + fmt(worst_grad, 3) + ", max |AR(1) - OLS| " + fmt(worst_ols, 3) +
              ", " + fmt(s, 3) + " s"};
}

Outcome scatter_geometry() {
  const auto data = gen_cosine({.n = 30, .x_lo = -3.0, .x_hi = 3.0, .angular_freq = M_PI,
                                .noise_sd = 0.0, .seed = 30});
  const auto km = kmeans(data.x, KMeansConfig{.q = 5, .seed = 1});
  const auto grid = gamma_grid(2.0, 4);
  const auto aug = augment_dataset_offline(data.x, data.y, km.assignment, grid);

  const auto& labels = km.assignment.labels();
  const Matrix cx = oracle::naive_group_mean(labels, data.x);
  const Vector cy = oracle::naive_group_mean(labels, Matrix(data.y)).col(0);

  bool identity_exact = true;
  double ray = 0.0, centroid = 0.0;
  for (Index k = 0; k < aug.x.rows(); ++k) {
    const auto i = static_cast<Index>(aug.source_indices[static_cast<std::size_t>(k)]);
    const double g = aug.gammas[static_cast<std::size_t>(k)];
    if (g == 1.0) identity_exact = identity_exact && aug.x(k, 0) == data.x(i, 0) && aug.y(k) == data.y(i);
    const double r = 1.0 / std::sqrt(g);
    ray = std::max({ray, std::abs((aug.x(k, 0) - cx(i, 0)) - r * (data.x(i, 0) - cx(i, 0))),
                    std::abs((aug.y(k) - cy(i)) - r * (data.y(i) - cy(i)))});
  }
  for (std::size_t g = 0; g < grid.values.size(); ++g) {
    const auto block = static_cast<Index>(g) * 30;
    const Matrix bx = aug.x.middleRows(block, 30);
    const Matrix by = aug.y.segment(block, 30);
    centroid = std::max({centroid, (oracle::naive_group_mean(labels, bx) - cx).cwiseAbs().maxCoeff(),
                         (oracle::naive_group_mean(labels, by).col(0) - cy).cwiseAbs().maxCoeff()});
  }
  const bool count = aug.x.rows() == 150;
  return {count && identity_exact && ray <= 1e-9 && centroid <= 1e-9,
          std::to_string(aug.x.rows()) + " points, gamma=1 exact " + (identity_exact ? "yes" : "no") +
              ", ray residual " + fmt(ray, 3) + ", centroid drift " + fmt(centroid, 3)};
}

Outcome taylor_preservation() {
  Stopwatch sw;
  const auto data = gen_cosine({.n = 256, .x_lo = -3 * M_PI, .x_hi = 3 * M_PI, .angular_freq = 1.0,
                                .noise_sd = 0.0, .grid = true});
  auto residual = [&](std::size_t q) {
    const auto km = kmeans(data.x, KMeansConfig{.q = q, .seed = 1});
    const auto t = ada_transform(data.x, data.y, projection_compact(km.assignment), 2.0);
    return (t.y.array() - t.x.col(0).array().cos()).abs().maxCoeff();
  };
  const double r8 = residual(8), r16 = residual(16), r32 = residual(32);
  const double s = sw.seconds();
  const double f1 = r8 / r16, f2 = r16 / r32;
  return {f1 >= 3.0 && f2 >= 3.0 && s < 5.0,
          "max residual " + fmt(r8, 3) + " / " + fmt(r16, 3) + " / " + fmt(r32, 3) +
              " for q=8/16/32, factors " + fmt(f1, 3) + " and " + fmt(f2, 3) + ", " + fmt(s, 3) + " s"};
}

Outcome cosine_experiment() {
  Stopwatch sw;
  const auto cfg = config("cosine_ada.json");
  const auto ada = run_experiment(cfg);
  const auto base = run_experiment(baseline_of(cfg));
  const double s = sw.seconds();
  const bool ok = cfg.seeds.size() >= 10 && ada.n_ok == cfg.seeds.size() &&
                  base.n_ok == cfg.seeds.size() && ada.mean.mse < base.mean.mse && s < 300.0;
  return {ok, "mean test MSE ada " + fmt(ada.mean.mse) + " vs baseline " + fmt(base.mean.mse) +
                  " over " + std::to_string(cfg.seeds.size()) + " seeds, " + fmt(s, 3) + " s"};
}

// Missing data is a failure, reported with the expected location.
std::optional<Outcome> require_data(const ExperimentConfig& cfg) {
  const auto desc = load_descriptor(std::get<CsvDataset>(cfg.dataset).descriptor);
  if (fs::exists(desc.path)) return std::nullopt;
  return Outcome{false, "dataset file not found: " + fs::weakly_canonical(desc.path).string() +
                            " (see data/README.md)"};
}

Outcome tabular(const std::string& file, double budget_s,
                const std::function<std::pair<bool, std::string>(const ExperimentResult&,
                                                                 const ExperimentResult&)>& judge) {
  const auto cfg = config(file);
  try {
    if (auto missing = require_data(cfg)) return *missing;
  } catch (const Error& e) {
    return {false, e.what()};
  }
  Stopwatch sw;
  const auto ada = run_experiment(cfg);
  const auto erm = run_experiment(baseline_of(cfg));
  const double s = sw.seconds();
  auto [ok, detail] = judge(ada, erm);
  return {ok && s < budget_s && ada.n_ok == cfg.seeds.size() && erm.n_ok == cfg.seeds.size(),
          detail + ", " + fmt(s, 4) + " s"};
}

Outcome airfoil() {
  return tabular("airfoil_ada.json", 900.0, [](const auto& ada, const auto& erm) {
    const double a = ada.mean.rmse, e = erm.mean.rmse;
    return std::pair{a >= 2.0 && a <= 2.9 && a < e,
                     "test RMSE ada " + fmt(a) + " +- " + fmt(ada.sd.rmse) + " vs erm " + fmt(e) +
                         " +- " + fmt(erm.sd.rmse)};
  });
}

Outcome no2() {
  return tabular("no2_ada.json", 600.0, [](const auto& ada, const auto& erm) {
    const double a = ada.mean.rmse, e = erm.mean.rmse;
    return std::pair{a <= e + 0.01, "test RMSE ada " + fmt(a) + " +- " + fmt(ada.sd.rmse) +
                                        " vs erm " + fmt(e) + " +- " + fmt(erm.sd.rmse)};
  });
}

Outcome linear_suite() {
  const auto cfg = config("linear_ridge_ada.json");
  bool ok = cfg.seeds.size() >= 20;
  std::string detail;
  for (std::size_t n : {20u, 50u}) {
    auto c = cfg;
    std::get<LinearScmDataset>(c.dataset).cfg.n = n;
    auto& m = std::get<AdaMethod>(c.method);
    m.alpha = 8.0;
    m.n_aug = 10;
    const auto ada10 = run_experiment(c);
    m.n_aug = 100;
    const auto ada100 = run_experiment(c);
    const auto ridge = run_experiment(baseline_of(c));
    ok = ok && ada10.mean.mse <= ridge.mean.mse && ada100.mean.mse <= ada10.mean.mse;
    detail += (detail.empty() ? "" : "; ") + std::string("n=") + std::to_string(n) + " ridge " +
              fmt(ridge.mean.mse, 5) + ", ada x10 " + fmt(ada10.mean.mse, 6) + ", ada x100 " +
              fmt(ada100.mean.mse, 6);
  }
  return {ok, detail + " (mean test MSE, " + std::to_string(cfg.seeds.size()) + " seeds)"};
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

bool identical(const ExperimentResult& a, const ExperimentResult& b) {
  if (a.per_seed.size() != b.per_seed.size() || a.config_hash != b.config_hash) return false;
  for (std::size_t i = 0; i < a.per_seed.size(); ++i) {
    const auto &x = a.per_seed[i].metrics, &y = b.per_seed[i].metrics;
    if (!same_bits(x.mse, y.mse) || !same_bits(x.rmse, y.rmse) || !same_bits(x.mape, y.mape)) return false;
  }
  return same_bits(a.mean.mse, b.mean.mse) && same_bits(a.sd.mse, b.sd.mse);
}

Outcome determinism() {
  kernels::set_threads(1);
  std::vector<ExperimentConfig> cfgs;

  auto cos = config("cosine_ada.json");
  cos.seeds = {0, 1, 2};
  std::get<MlpModel>(cos.model).cfg.epochs = 60;
  cfgs.push_back(cos);
  cfgs.push_back(baseline_of(cos));
  auto minibatch = cos;
  std::get<AdaMethod>(minibatch.method).offline = false;
  cfgs.push_back(minibatch);
  auto cmix = cos;
  cmix.method = CMixupMethod{};
  cfgs.push_back(cmix);
  auto mix = cos;
  mix.method = MixupMethod{};
  cfgs.push_back(mix);

  auto lin = config("linear_ridge_ada.json");
  cfgs.push_back(lin);
  cfgs.push_back(baseline_of(lin));
  auto ols = lin;
  ols.model = OlsModel{};
  cfgs.push_back(ols);

  // A CSV dataset written from the linear generator exercises the file path.
  const auto dir = fs::temp_directory_path() / "ada_acceptance_determinism";
  fs::create_directories(dir);
  const auto gen = gen_linear_scm({.n = 120, .d = 4, .seed = 3});
  {
    std::ofstream f(dir / "data.csv");
    f << std::setprecision(17) << "a,b,c,d,y\n";
    for (Index i = 0; i < gen.x.rows(); ++i) {
      for (Index j = 0; j < 4; ++j) f << gen.x(i, j) << ',';
      f << gen.y(i) << '\n';
    }
    std::ofstream(dir / "desc.json")
        << R"({"path": "data.csv", "split": {"train": 0.5, "val": 0.25, "test": 0.25, "seed": 1}})";
  }
  auto csv = cos;
  csv.dataset = CsvDataset{dir / "desc.json"};
  cfgs.push_back(csv);

  std::size_t same = 0;
  for (const auto& c : cfgs) {
    if (identical(run_experiment(c), run_experiment(c))) ++same;
  }
  return {same == cfgs.size(), std::to_string(same) + "/" + std::to_string(cfgs.size()) +
                                   " experiment configs reproduced bitwise at 1 thread"};
}

Vector flatten(const Mlp& m) {
  std::vector<double> v;
  for (std::size_t l = 0; l < m.layers(); ++l) {
    v.insert(v.end(), m.weights[l].data(), m.weights[l].data() + m.weights[l].size());
    v.insert(v.end(), m.biases[l].data(), m.biases[l].data() + m.biases[l].size());
  }
  return Eigen::Map<Vector>(v.data(), static_cast<Index>(v.size()));
}

Mlp unflatten(Mlp m, const Vector& p) {
  Index k = 0;
  for (std::size_t l = 0; l < m.layers(); ++l) {
    for (Index i = 0; i < m.weights[l].size(); ++i) m.weights[l].data()[i] = p(k++);
    for (Index i = 0; i < m.biases[l].size(); ++i) m.biases[l](i) = p(k++);
  }
  return m;
}

Outcome gradient_check() {
  Rng rng(10);
  double worst = 0.0;
  int nets = 0;
  for (auto act : {Activation::ReLU, Activation::Sigmoid}) {
    for (int t = 0; t < 20; ++t, ++nets) {
      const auto d = static_cast<Index>(1 + rng.uniform_index(4));
      std::vector<std::size_t> widths(1 + rng.uniform_index(3));
      for (auto& w : widths) w = 2 + rng.uniform_index(6);
      Mlp m = Mlp::init(d, widths, act, rng);
      // Nonzero biases keep ReLU units off their kink (a dead layer feeds z = b).
      for (auto& b : m.biases) b = 0.5 * oracle::random_vector(b.size(), rng);
      const Matrix x = oracle::random_matrix(5, d, rng);
      const Vector y = oracle::random_vector(5, rng);
      const auto g = mlp_gradients(m, x, y);
      Mlp tmp;
      tmp.weights = g.weights;
      tmp.biases = g.biases;
      const Vector analytic = flatten(tmp);
      const Vector numeric = oracle::numeric_gradient(
          [&](const Vector& p) { return mlp_loss(unflatten(m, p), x, y); }, flatten(m), 1e-5);
      for (Index i = 0; i < analytic.size(); ++i) {
        const double scale = std::max({std::abs(analytic(i)), std::abs(numeric(i)), 1e-3});
        worst = std::max(worst, std::abs(analytic(i) - numeric(i)) / scale);
      }
    }
  }
  return {worst < 1e-4, "max relative error " + fmt(worst, 3) + " over " + std::to_string(nets) +
                            " random networks (ReLU and sigmoid)"};
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--only" && i + 1 < argc) only = std::stoi(argv[++i]);
  }
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"projection oracle equivalence", projection_equivalence},
      {"anchor regression identity", anchor_regression_identity},
      {"augmentation geometry on the 30-point example", scatter_geometry},
      {"Taylor preservation", taylor_preservation},
      {"cosine experiment", cosine_experiment},
      {"Airfoil in-distribution", airfoil},
      {"NO2 in-distribution", no2},
      {"linear synthetic suite", linear_suite},
      {"determinism", determinism},
      {"MLP gradient correctness", gradient_check},
  };
  if (only < 0 || only > static_cast<int>(criteria.size())) {
    std::cerr << "--only expects 1.." << criteria.size() << '\n';
    return 2;
  }
  int failed = 0;
  for (std::size_t c = 0; c < criteria.size(); ++c) {
    if (only != 0 && static_cast<int>(c) + 1 != only) continue;
    Outcome o;
    try {
      o = criteria[c].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << c + 1 << ". " << criteria[c].first << ": "
              << o.detail << std::endl;
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
