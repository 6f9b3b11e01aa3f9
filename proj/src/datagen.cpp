#include "ada/datagen.hpp"

#include <cmath>

#include "ada/rng.hpp"

namespace ada {

GeneratedData gen_cosine(const CosineConfig& cfg) {
  if (!(cfg.x_hi > cfg.x_lo)) throw Error(ErrorKind::Config, "cosine needs x_hi > x_lo");
  if (!(cfg.noise_sd >= 0.0)) throw Error(ErrorKind::Config, "cosine needs noise_sd >= 0");
  if (cfg.n < 1) throw Error(ErrorKind::Config, "cosine needs n >= 1");

  Rng root(cfg.seed);
  Rng x_rng = root.split(1);
  Rng noise_rng = root.split(2);
  const auto n = static_cast<Index>(cfg.n);
  GeneratedData out{Matrix(n, 1), Vector(n)};
  for (Index i = 0; i < n; ++i) {
    double x;
    if (cfg.grid) {
      x = n == 1 ? cfg.x_lo
                 : cfg.x_lo + (cfg.x_hi - cfg.x_lo) * static_cast<double>(i) /
                                  static_cast<double>(n - 1);
      if (i == n - 1 && n > 1) x = cfg.x_hi;
    } else {
      x = x_rng.uniform(cfg.x_lo, cfg.x_hi);
    }
    out.x(i, 0) = x;
    const double eps = cfg.noise_sd > 0.0 ? noise_rng.normal(0.0, cfg.noise_sd) : 0.0;
    out.y(i) = std::cos(cfg.angular_freq * x) + eps;
  }
  return out;
}

LinearScmData gen_linear_scm(const LinearScmConfig& cfg) {
  if (cfg.n < 1 || cfg.d < 1) throw Error(ErrorKind::Config, "linear SCM needs n, d >= 1");
  if (cfg.groups < 1) throw Error(ErrorKind::Config, "linear SCM needs groups >= 1");
  if (!(cfg.noise_sd >= 0.0)) throw Error(ErrorKind::Config, "noise_sd must be >= 0");

  Rng root(cfg.seed);
  Rng model_rng = root.split(1);
  Rng sample_rng = root.split(2);
  const auto d = static_cast<Index>(cfg.d);
  const auto q = static_cast<Index>(cfg.groups);

  LinearScmData out;
  out.true_coef.resize(d);
  for (Index j = 0; j < d; ++j) out.true_coef(j) = model_rng.normal(0.0, cfg.coef_sd);
  Matrix directions(q, d);
  for (Index r = 0; r < q; ++r) {
    for (Index j = 0; j < d; ++j) directions(r, j) = model_rng.normal();
    directions.row(r).normalize();
  }

  const auto n = static_cast<Index>(cfg.n);
  out.x.resize(n, d);
  out.y.resize(n);
  out.anchor_labels.resize(cfg.n);
  for (Index i = 0; i < n; ++i) {
    const auto r = static_cast<Index>(sample_rng.uniform_index(cfg.groups));
    out.anchor_labels[static_cast<std::size_t>(i)] = static_cast<std::size_t>(r);
    for (Index j = 0; j < d; ++j) {
      out.x(i, j) = cfg.anchor_shift_strength * directions(r, j) + sample_rng.normal();
    }
    const double eps = cfg.noise_sd > 0.0 ? sample_rng.normal(0.0, cfg.noise_sd) : 0.0;
    out.y(i) = out.x.row(i).dot(out.true_coef) + eps;
  }
  return out;
}

}  // namespace ada
