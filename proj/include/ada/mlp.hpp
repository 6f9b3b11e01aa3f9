#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "ada/anchor.hpp"
#include "ada/augment.hpp"
#include "ada/types.hpp"

namespace ada {

enum class Activation { ReLU, Sigmoid };
enum class OptimizerKind { SGD, Adam };

struct AdamParams {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct NoHook {};

// Anchor augmentation per minibatch; `assignment` covers the training rows.
struct AdaHook {
  GammaPrior prior{2.0};
  AnchorAssignment assignment;
};

struct CMixupHook {
  CMixupConfig cfg;
};

struct MixupHook {
  MixupConfig cfg;
};

using AugmentationHook = std::variant<NoHook, AdaHook, CMixupHook, MixupHook>;

struct MLPConfig {
  std::vector<std::size_t> layer_widths{50, 50, 50, 50, 50};
  Activation activation = Activation::ReLU;
  double learning_rate = 1e-3;
  std::size_t epochs = 100;
  std::size_t batch_size = 32;
  OptimizerKind optimizer = OptimizerKind::Adam;
  AdamParams adam;
  std::uint64_t seed = 0;
  AugmentationHook hook = NoHook{};
};

void validate(const MLPConfig& cfg);

/// Fully connected network with a scalar linear output.
struct Mlp {
  std::vector<Matrix> weights;  // layer l: out x in
  std::vector<Vector> biases;
  Activation activation = Activation::ReLU;

  // Glorot-uniform weights, zero biases.
  static Mlp init(Index input_dim, const std::vector<std::size_t>& widths,
                  Activation act, Rng& rng);

  std::size_t layers() const { return weights.size(); }
  Index input_dim() const { return weights.front().cols(); }
};

Vector mlp_predict(const Mlp& model, const Matrix& x);

struct MlpGradients {
  double loss = 0.0;  // mean squared error over the batch
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
};

MlpGradients mlp_gradients(const Mlp& model, const Matrix& x, const Vector& y);
double mlp_loss(const Mlp& model, const Matrix& x, const Vector& y);

struct TrainReport {
  std::vector<double> train_loss_curve;  // mean batch loss per epoch
  std::vector<double> val_mse_curve;
  double final_val_mse = 0.0;  // at the returned (best) epoch
  std::size_t epochs_run = 0;
  std::size_t best_epoch = 0;
  double wall_time = 0.0;  // seconds
};

struct TrainResult {
  Mlp model;
  TrainReport report;
};

class TrainingDiverged : public Error {
 public:
  TrainingDiverged(const std::string& what, TrainReport report)
      : Error(ErrorKind::Divergence, what), report_(std::move(report)) {}
  const TrainReport& report() const { return report_; }

 private:
  TrainReport report_;
};

/// Minibatch training on squared error. Each epoch reshuffles the training
/// rows, passes every batch through the augmentation hook before the forward
/// pass, and steps the optimizer. The model with the lowest validation MSE is
/// returned (the last one when `val` is empty). Deterministic given cfg.seed.
TrainResult mlp_train(const MLPConfig& cfg, const CenteredDataset& train,
                      const CenteredDataset& val);

}  // namespace ada
