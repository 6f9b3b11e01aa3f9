#pragma once

#include <cstdint>
#include <vector>

#include "ada/types.hpp"

namespace ada {

struct CosineConfig {
  std::size_t n = 20;
  double x_lo = -3.0 * M_PI;
  double x_hi = 3.0 * M_PI;
  double angular_freq = 1.0;
  double noise_sd = 0.1;
  bool grid = false;  // equidistant x (endpoints included) instead of uniform
  std::uint64_t seed = 0;
};

struct GeneratedData {
  Matrix x;
  Vector y;
};

// y = cos(angular_freq * x) + N(0, noise_sd^2).
GeneratedData gen_cosine(const CosineConfig& cfg);

struct LinearScmConfig {
  std::size_t n = 200;
  std::size_t d = 10;
  std::size_t groups = 5;
  double anchor_shift_strength = 2.0;
  double noise_sd = 1.0;
  double coef_sd = 1.0;
  std::uint64_t seed = 0;
};

struct LinearScmData {
  Matrix x;
  Vector y;
  Vector true_coef;
  std::vector<std::size_t> anchor_labels;
};

/// Linear data with a discrete anchor shifting the predictor mean.
///
/// Group r (drawn uniformly) moves x by shift * mu_r with mu_r a seeded unit
/// vector; x = shift * mu_r + N(0, I), y = x^T b + N(0, noise_sd^2) with
/// b ~ N(0, coef_sd^2 I). The coefficients and group directions depend only on
/// the seed, never on n, so datasets of different sizes share the same model.
LinearScmData gen_linear_scm(const LinearScmConfig& cfg);

}  // namespace ada
