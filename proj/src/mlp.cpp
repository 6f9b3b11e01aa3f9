#include "ada/mlp.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

namespace ada {

namespace {

Matrix activate(const Matrix& z, Activation act) {
  switch (act) {
    case Activation::ReLU:
      return z.cwiseMax(0.0);
    case Activation::Sigmoid:
      return (1.0 + (-z.array()).exp()).inverse().matrix();
  }
  return z;
}

// Derivative expressed through the pre-activation z and activation a.
Matrix activation_grad(const Matrix& z, const Matrix& a, Activation act) {
  switch (act) {
    case Activation::ReLU:
      return (z.array() > 0.0).cast<double>().matrix();
    case Activation::Sigmoid:
      return (a.array() * (1.0 - a.array())).matrix();
  }
  return Matrix::Ones(z.rows(), z.cols());
}

struct ForwardCache {
  std::vector<Matrix> pre;   // z_l
  std::vector<Matrix> post;  // a_l, post[0] = input
};

ForwardCache forward(const Mlp& model, const Matrix& x) {
  ForwardCache c;
  c.post.push_back(x);
  const std::size_t L = model.layers();
  for (std::size_t l = 0; l < L; ++l) {
    Matrix z = c.post.back() * model.weights[l].transpose();
    z.rowwise() += model.biases[l].transpose();
    c.pre.push_back(z);
    c.post.push_back(l + 1 < L ? activate(z, model.activation) : z);
  }
  return c;
}

}  // namespace

void validate(const MLPConfig& cfg) {
  for (auto w : cfg.layer_widths) {
    if (w < 1) throw Error(ErrorKind::Config, "MLP layer widths must be >= 1");
  }
  if (!(cfg.learning_rate > 0.0)) {
    throw Error(ErrorKind::Config, "MLP learning rate must be > 0");
  }
  if (cfg.batch_size < 1) throw Error(ErrorKind::Config, "MLP batch size must be >= 1");
  if (cfg.epochs < 1) throw Error(ErrorKind::Config, "MLP needs at least one epoch");
}

Mlp Mlp::init(Index input_dim, const std::vector<std::size_t>& widths,
              Activation act, Rng& rng) {
  Mlp m;
  m.activation = act;
  Index fan_in = input_dim;
  std::vector<Index> outs;
  for (auto w : widths) outs.push_back(static_cast<Index>(w));
  outs.push_back(1);
  for (Index fan_out : outs) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Matrix w(fan_out, fan_in);
    for (Index i = 0; i < w.rows(); ++i) {
      for (Index j = 0; j < w.cols(); ++j) w(i, j) = rng.uniform(-limit, limit);
    }
    m.weights.push_back(std::move(w));
    m.biases.push_back(Vector::Zero(fan_out));
    fan_in = fan_out;
  }
  return m;
}

Vector mlp_predict(const Mlp& model, const Matrix& x) {
  if (x.cols() != model.input_dim()) {
    throw Error(ErrorKind::Dimension, "MLP input has " + std::to_string(x.cols()) +
                                          " columns, expected " +
                                          std::to_string(model.input_dim()));
  }
  return forward(model, x).post.back().col(0);
}

double mlp_loss(const Mlp& model, const Matrix& x, const Vector& y) {
  return (mlp_predict(model, x) - y).squaredNorm() / static_cast<double>(y.size());
}

MlpGradients mlp_gradients(const Mlp& model, const Matrix& x, const Vector& y) {
  const auto c = forward(model, x);
  const auto n = static_cast<double>(x.rows());
  const Vector err = c.post.back().col(0) - y;

  MlpGradients g;
  g.loss = err.squaredNorm() / n;
  const std::size_t L = model.layers();
  g.weights.resize(L);
  g.biases.resize(L);

  Matrix delta = (2.0 / n) * err;  // dLoss/dz for the output layer
  for (std::size_t l = L; l-- > 0;) {
    g.weights[l] = delta.transpose() * c.post[l];
    g.biases[l] = delta.colwise().sum().transpose();
    if (l == 0) break;
    Matrix upstream = delta * model.weights[l];
    delta = upstream.cwiseProduct(
        activation_grad(c.pre[l - 1], c.post[l], model.activation));
  }
  return g;
}

namespace {

class Optimizer {
 public:
  Optimizer(const MLPConfig& cfg, const Mlp& model) : cfg_(cfg) {
    if (cfg.optimizer == OptimizerKind::Adam) {
      for (std::size_t l = 0; l < model.layers(); ++l) {
        mw_.push_back(Matrix::Zero(model.weights[l].rows(), model.weights[l].cols()));
        vw_.push_back(mw_.back());
        mb_.push_back(Vector::Zero(model.biases[l].size()));
        vb_.push_back(mb_.back());
      }
    }
  }

  void step(Mlp& model, const MlpGradients& g) {
    const double lr = cfg_.learning_rate;
    if (cfg_.optimizer == OptimizerKind::SGD) {
      for (std::size_t l = 0; l < model.layers(); ++l) {
        model.weights[l] -= lr * g.weights[l];
        model.biases[l] -= lr * g.biases[l];
      }
      return;
    }
    const auto& p = cfg_.adam;
    ++t_;
    const double c1 = 1.0 - std::pow(p.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(p.beta2, static_cast<double>(t_));
    for (std::size_t l = 0; l < model.layers(); ++l) {
      update(model.weights[l], g.weights[l], mw_[l], vw_[l], c1, c2);
      update(model.biases[l], g.biases[l], mb_[l], vb_[l], c1, c2);
    }
  }

 private:
  template <typename T>
  void update(T& param, const T& grad, T& m, T& v, double c1, double c2) {
    const auto& p = cfg_.adam;
    m = p.beta1 * m + (1.0 - p.beta1) * grad;
    v = p.beta2 * v + (1.0 - p.beta2) * grad.cwiseAbs2();
    param.array() -= cfg_.learning_rate * (m.array() / c1) /
                     ((v.array() / c2).sqrt() + p.eps);
  }

  const MLPConfig& cfg_;
  std::size_t t_ = 0;
  std::vector<Matrix> mw_, vw_;
  std::vector<Vector> mb_, vb_;
};

struct Batch {
  Matrix x;
  Vector y;
};

Batch apply_hook(const AugmentationHook& hook, const Matrix& x, const Vector& y,
                 std::span<const std::size_t> rows, Rng& rng) {
  return std::visit(
      [&](const auto& h) -> Batch {
        using H = std::decay_t<decltype(h)>;
        if constexpr (std::is_same_v<H, NoHook>) {
          return {x, y};
        } else if constexpr (std::is_same_v<H, AdaHook>) {
          auto b = ada_minibatch(x, y, h.assignment.subset(rows), h.prior, rng);
          return {std::move(b.x), std::move(b.y)};
        } else if constexpr (std::is_same_v<H, CMixupHook>) {
          if (x.rows() < 2) return {x, y};
          auto b = cmixup_minibatch(x, y, h.cfg, rng);
          return {std::move(b.x), std::move(b.y)};
        } else {
          if (x.rows() < 2) return {x, y};
          auto b = mixup_minibatch(x, y, h.cfg, rng);
          return {std::move(b.x), std::move(b.y)};
        }
      },
      hook);
}

}  // namespace

TrainResult mlp_train(const MLPConfig& cfg, const CenteredDataset& train,
                      const CenteredDataset& val) {
  validate(cfg);
  check_dataset(train.x, train.y);
  if (const auto* ada = std::get_if<AdaHook>(&cfg.hook)) {
    if (static_cast<Index>(ada->assignment.size()) != train.n()) {
      throw Error(ErrorKind::Dimension,
                  "ADA hook assignment does not cover the training rows");
    }
  }
  const auto start = std::chrono::steady_clock::now();

  // Independent streams: initialization, shuffling, augmentation. Keeping the
  // hook on its own stream makes a near-identity hook leave everything else
  // unchanged.
  Rng root(cfg.seed);
  Rng init_rng = root.split(1);
  Rng shuffle_rng = root.split(2);
  Rng hook_rng = root.split(3);

  TrainResult out{Mlp::init(train.d(), cfg.layer_widths, cfg.activation, init_rng), {}};
  Mlp model = out.model;
  Optimizer opt(cfg, model);
  const bool has_val = val.n() > 0;
  double best_val = std::numeric_limits<double>::infinity();

  const auto n = static_cast<std::size_t>(train.n());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  Matrix bx;
  Vector by;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = n; i > 1; --i) {
      std::swap(order[i - 1], order[shuffle_rng.uniform_index(i)]);
    }
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t startrow = 0; startrow < n; startrow += cfg.batch_size) {
      const std::size_t len = std::min(cfg.batch_size, n - startrow);
      std::span<const std::size_t> rows(order.data() + startrow, len);
      bx.resize(static_cast<Index>(len), train.d());
      by.resize(static_cast<Index>(len));
      for (std::size_t k = 0; k < len; ++k) {
        bx.row(static_cast<Index>(k)) = train.x.row(static_cast<Index>(rows[k]));
        by(static_cast<Index>(k)) = train.y(static_cast<Index>(rows[k]));
      }
      const Batch b = apply_hook(cfg.hook, bx, by, rows, hook_rng);
      const auto g = mlp_gradients(model, b.x, b.y);
      if (!std::isfinite(g.loss)) {
        out.report.epochs_run = epoch + 1;
        out.report.wall_time = std::chrono::duration<double>(
                                   std::chrono::steady_clock::now() - start)
                                   .count();
        throw TrainingDiverged("training loss became non-finite in epoch " +
                                   std::to_string(epoch),
                               out.report);
      }
      opt.step(model, g);
      loss_sum += g.loss;
      ++batches;
    }
    out.report.train_loss_curve.push_back(loss_sum / static_cast<double>(batches));
    out.report.epochs_run = epoch + 1;

    if (has_val) {
      const double v = mlp_loss(model, val.x, val.y);
      out.report.val_mse_curve.push_back(v);
      if (v < best_val) {
        best_val = v;
        out.model = model;
        out.report.best_epoch = epoch;
      }
    }
  }
  if (has_val) {
    out.report.final_val_mse = best_val;
  } else {
    out.model = model;
    out.report.best_epoch = cfg.epochs - 1;
  }
  if (!std::isfinite(out.report.final_val_mse)) {
    throw TrainingDiverged("validation loss is non-finite", out.report);
  }
  out.report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace ada
