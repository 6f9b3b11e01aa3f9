#include "ada/augment.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

namespace ada {

GammaPrior::GammaPrior(double a) : alpha(a) {
  if (!(alpha > 1.0) || !std::isfinite(alpha)) {
    throw Error(ErrorKind::Config, "gamma prior needs alpha > 1");
  }
}

GammaGrid gamma_grid(double alpha, std::size_t k) {
  if (!(alpha > 1.0) || !std::isfinite(alpha)) {
    throw Error(ErrorKind::Config, "gamma grid needs alpha > 1");
  }
  if (k < 2 || k % 2 != 0) {
    throw Error(ErrorKind::Config,
                "gamma grid needs an even k >= 2, got " + std::to_string(k));
  }
  const std::size_t half = k / 2;
  std::vector<double> betas(half);
  for (std::size_t i = 1; i <= half; ++i) {
    betas[i - 1] = 1.0 + (alpha - 1.0) * static_cast<double>(i) /
                             static_cast<double>(half);
  }
  // The largest beta is alpha by construction; pin it to avoid rounding.
  betas[half - 1] = alpha;

  GammaGrid grid{alpha, k, {}};
  grid.values.reserve(k + 1);
  for (std::size_t i = half; i-- > 0;) grid.values.push_back(1.0 / betas[i]);
  grid.values.push_back(1.0);
  for (double b : betas) grid.values.push_back(b);
  return grid;
}

GammaGrid identity_grid() { return GammaGrid{1.0, 0, {1.0}}; }

double sample_gamma(const GammaPrior& prior, Rng& rng) {
  return rng.uniform(prior.lo(), prior.hi());
}

namespace {

void check_shapes(const Matrix& x, const Vector& y, const ProjectionOperator& pi) {
  if (x.rows() != y.size() || static_cast<std::size_t>(x.rows()) != pi.size()) {
    throw Error(ErrorKind::Dimension,
                "transform shapes disagree: x rows " + std::to_string(x.rows()) +
                    ", y length " + std::to_string(y.size()) + ", projection " +
                    std::to_string(pi.size()));
  }
}

void check_gamma(double gamma) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    std::ostringstream os;
    os << "gamma must be finite and >= 0, got " << gamma;
    throw Error(ErrorKind::Config, os.str());
  }
}

}  // namespace

AugmentedPair ar_transform(const Matrix& x, const Vector& y,
                           const ProjectionOperator& pi, double gamma) {
  check_gamma(gamma);
  check_shapes(x, y, pi);
  const double s = std::sqrt(gamma) - 1.0;
  if (s == 0.0) return {x, y};
  AugmentedPair out{x + s * pi.apply(x), y + s * pi.apply(y)};
  return out;
}

AugmentedPair ada_transform(const Matrix& x, const Vector& y,
                            const ProjectionOperator& pi, double gamma) {
  check_gamma(gamma);
  check_shapes(x, y, pi);
  const double s = std::sqrt(gamma) - 1.0;
  if (s == 0.0) return {x, y};

  const Matrix px = pi.apply(x);
  const Vector py = pi.apply(y);
  AugmentedPair out{Matrix(x.rows(), x.cols()), Vector(y.size())};
  for (Index i = 0; i < x.rows(); ++i) {
    const double den = 1.0 + s * pi.row_sum(static_cast<std::size_t>(i));
    if (std::abs(den) < 1e-14) {
      std::ostringstream os;
      os << "ADA denominator vanishes at sample " << i << " for gamma=" << gamma;
      throw Error(ErrorKind::Numeric, os.str());
    }
    out.x.row(i) = (x.row(i) + s * px.row(i)) / den;
    out.y(i) = (y(i) + s * py(i)) / den;
  }
  return out;
}

AugmentedBatch ada_minibatch(const Matrix& batch_x, const Vector& batch_y,
                             const AnchorAssignment& batch_assignment,
                             const GammaPrior& prior, Rng& rng) {
  if (batch_x.rows() < 1) throw Error(ErrorKind::Dimension, "empty minibatch");
  if (static_cast<Index>(batch_assignment.size()) != batch_x.rows()) {
    throw Error(ErrorKind::Dimension,
                "batch assignment covers " + std::to_string(batch_assignment.size()) +
                    " rows, batch has " + std::to_string(batch_x.rows()));
  }
  const double gamma = sample_gamma(prior, rng);
  const auto pi = ProjectionOperator::from_assignment(batch_assignment);
  auto t = ada_transform(batch_x, batch_y, pi, gamma);
  AugmentedBatch out;
  out.x = std::move(t.x);
  out.y = std::move(t.y);
  out.gamma = gamma;
  out.source_indices.resize(static_cast<std::size_t>(batch_x.rows()));
  std::iota(out.source_indices.begin(), out.source_indices.end(), std::size_t{0});
  return out;
}

OfflineAugmentation augment_dataset_offline(const Matrix& x, const Vector& y,
                                            const AnchorAssignment& assignment,
                                            const GammaGrid& grid) {
  if (grid.values.empty()) throw Error(ErrorKind::Config, "empty gamma grid");
  check_dataset(x, y);
  const auto pi = ProjectionOperator::from_assignment(assignment);
  const Index n = x.rows();
  const auto copies = static_cast<Index>(grid.values.size());
  OfflineAugmentation out;
  out.x.resize(n * copies, x.cols());
  out.y.resize(n * copies);
  out.source_indices.reserve(static_cast<std::size_t>(n * copies));
  out.gammas.reserve(static_cast<std::size_t>(n * copies));
  for (Index g = 0; g < copies; ++g) {
    const double gamma = grid.values[static_cast<std::size_t>(g)];
    auto t = ada_transform(x, y, pi, gamma);
    out.x.middleRows(g * n, n) = t.x;
    out.y.segment(g * n, n) = t.y;
    for (Index i = 0; i < n; ++i) {
      out.source_indices.push_back(static_cast<std::size_t>(i));
      out.gammas.push_back(gamma);
    }
  }
  return out;
}

std::vector<double> cmixup_partner_weights(const Vector& y, std::size_t i,
                                           double bandwidth) {
  const auto n = static_cast<std::size_t>(y.size());
  std::vector<double> w(n, 0.0);
  // Shift exponents by the closest label so tiny bandwidths do not underflow.
  double min_sq = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    if (j == i) continue;
    const double d = y(static_cast<Index>(i)) - y(static_cast<Index>(j));
    min_sq = std::min(min_sq, d * d);
  }
  double total = 0.0;
  const double denom = 2.0 * bandwidth * bandwidth;
  for (std::size_t j = 0; j < n; ++j) {
    if (j == i) continue;
    const double d = y(static_cast<Index>(i)) - y(static_cast<Index>(j));
    w[j] = std::exp(-(d * d - min_sq) / denom);
    total += w[j];
  }
  for (auto& v : w) v /= total;
  return w;
}

namespace {

void check_mix_batch(const Matrix& x, const Vector& y, double beta_param) {
  if (x.rows() != y.size()) {
    throw Error(ErrorKind::Dimension, "batch x/y lengths differ");
  }
  if (x.rows() < 2) {
    throw Error(ErrorKind::Data, "mixing needs a batch of at least 2 samples");
  }
  if (!(beta_param > 0.0)) {
    throw Error(ErrorKind::Config, "mixing needs beta_param > 0");
  }
}

double draw_lambda(double beta_param, const std::optional<double>& fixed,
                   Rng& rng) {
  if (fixed) return *fixed;
  return rng.beta(beta_param, beta_param);
}

std::size_t draw_from(const std::vector<double>& probs, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t j = 0; j < probs.size(); ++j) {
    if (probs[j] <= 0.0) continue;
    acc += probs[j];
    last = j;
    if (u < acc) return j;
  }
  return last;
}

AugmentedBatch mix_pairs(const Matrix& x, const Vector& y,
                         std::vector<std::size_t> partners, double lambda) {
  AugmentedBatch out;
  out.x.resize(x.rows(), x.cols());
  out.y.resize(y.size());
  for (Index i = 0; i < x.rows(); ++i) {
    const auto j = static_cast<Index>(partners[static_cast<std::size_t>(i)]);
    out.x.row(i) = lambda * x.row(i) + (1.0 - lambda) * x.row(j);
    out.y(i) = lambda * y(i) + (1.0 - lambda) * y(j);
  }
  out.gamma = 1.0;
  out.lambda = lambda;
  out.source_indices.resize(static_cast<std::size_t>(x.rows()));
  std::iota(out.source_indices.begin(), out.source_indices.end(), std::size_t{0});
  out.partner_indices = std::move(partners);
  return out;
}

}  // namespace

AugmentedBatch cmixup_minibatch(const Matrix& batch_x, const Vector& batch_y,
                                const CMixupConfig& cfg, Rng& rng) {
  check_mix_batch(batch_x, batch_y, cfg.beta_param);
  if (!(cfg.bandwidth > 0.0)) {
    throw Error(ErrorKind::Config, "C-Mixup needs bandwidth > 0");
  }
  const double lambda = draw_lambda(cfg.beta_param, cfg.fixed_lambda, rng);
  const auto n = static_cast<std::size_t>(batch_x.rows());
  std::vector<std::size_t> partners(n);
  for (std::size_t i = 0; i < n; ++i) {
    partners[i] = draw_from(cmixup_partner_weights(batch_y, i, cfg.bandwidth), rng);
  }
  return mix_pairs(batch_x, batch_y, std::move(partners), lambda);
}

AugmentedBatch mixup_minibatch(const Matrix& batch_x, const Vector& batch_y,
                               const MixupConfig& cfg, Rng& rng) {
  check_mix_batch(batch_x, batch_y, cfg.beta_param);
  const double lambda = draw_lambda(cfg.beta_param, cfg.fixed_lambda, rng);
  const auto n = static_cast<std::size_t>(batch_x.rows());
  std::vector<std::size_t> partners(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto j = static_cast<std::size_t>(rng.uniform_index(n - 1));
    partners[i] = j >= i ? j + 1 : j;
  }
  return mix_pairs(batch_x, batch_y, std::move(partners), lambda);
}

}  // namespace ada
