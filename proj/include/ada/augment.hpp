#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "ada/anchor.hpp"
#include "ada/rng.hpp"
#include "ada/types.hpp"

namespace ada {

/// Uniform prior for gamma on [1/alpha, alpha].
struct GammaPrior {
  double alpha = 2.0;

  explicit GammaPrior(double a);
  double lo() const { return 1.0 / alpha; }
  double hi() const { return alpha; }
};

/// Symmetric gamma grid {1/alpha, 1/beta_{k/2-1}, ..., 1, ..., beta_{k/2-1}, alpha}
/// with beta_i = 1 + (alpha - 1) * i / (k/2).
struct GammaGrid {
  double alpha = 2.0;
  std::size_t k = 2;
  std::vector<double> values;  // ascending, length k + 1
};

GammaGrid gamma_grid(double alpha, std::size_t k);

// Grid holding only gamma = 1; offline augmentation with it is the identity.
GammaGrid identity_grid();

double sample_gamma(const GammaPrior& prior, Rng& rng);

struct AugmentedPair {
  Matrix x;
  Vector y;
};

// Anchor-regression modification: x + (sqrt(gamma) - 1) Pi x, likewise for y.
AugmentedPair ar_transform(const Matrix& x, const Vector& y,
                           const ProjectionOperator& pi, double gamma);

// Row-normalized modification; for one-hot anchors each row moves along the
// ray through its group centroid, x~ = c + (x - c) / sqrt(gamma).
AugmentedPair ada_transform(const Matrix& x, const Vector& y,
                            const ProjectionOperator& pi, double gamma);

struct AugmentedBatch {
  Matrix x;
  Vector y;
  double gamma = 1.0;
  std::vector<std::size_t> source_indices;
  // Mixup variants only: partner of each row and the mixing weight.
  std::vector<std::size_t> partner_indices;
  double lambda = 1.0;
};

/// One minibatch of anchor augmentation: a single gamma drawn from the prior,
/// the projection rebuilt from the batch's own anchor rows, then the
/// row-normalized transform. Inputs are not modified.
AugmentedBatch ada_minibatch(const Matrix& batch_x, const Vector& batch_y,
                             const AnchorAssignment& batch_assignment,
                             const GammaPrior& prior, Rng& rng);

struct OfflineAugmentation {
  Matrix x;
  Vector y;
  // Per output row: source sample and gamma. Rows are grid-major.
  std::vector<std::size_t> source_indices;
  std::vector<double> gammas;
};

OfflineAugmentation augment_dataset_offline(const Matrix& x, const Vector& y,
                                            const AnchorAssignment& assignment,
                                            const GammaGrid& grid);

struct MixupConfig {
  double beta_param = 2.0;
  // Overrides the Beta draw when set.
  std::optional<double> fixed_lambda;
};

struct CMixupConfig {
  double bandwidth = 1.0;
  double beta_param = 2.0;
  std::optional<double> fixed_lambda;
};

// Normalized partner probabilities for row i under the label kernel
// exp(-(y_i - y_j)^2 / (2 h^2)), j != i.
std::vector<double> cmixup_partner_weights(const Vector& y, std::size_t i,
                                           double bandwidth);

AugmentedBatch cmixup_minibatch(const Matrix& batch_x, const Vector& batch_y,
                                const CMixupConfig& cfg, Rng& rng);

AugmentedBatch mixup_minibatch(const Matrix& batch_x, const Vector& batch_y,
                               const MixupConfig& cfg, Rng& rng);

}  // namespace ada
