#include "ada/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ada/kernels.hpp"
#include "ada/rng.hpp"

namespace ada {

namespace {

Matrix seed_plus_plus(const Matrix& x, std::size_t q, Rng& rng) {
  const Index n = x.rows();
  Matrix centroids(static_cast<Index>(q), x.cols());
  std::vector<bool> chosen(static_cast<std::size_t>(n), false);

  auto first = static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(n)));
  centroids.row(0) = x.row(first);
  chosen[static_cast<std::size_t>(first)] = true;

  Vector d2(n);
  for (Index i = 0; i < n; ++i) d2(i) = (x.row(i) - centroids.row(0)).squaredNorm();

  for (std::size_t r = 1; r < q; ++r) {
    const double total = d2.sum();
    Index pick = -1;
    if (total > 0.0) {
      const double u = rng.uniform() * total;
      double acc = 0.0;
      for (Index i = 0; i < n; ++i) {
        acc += d2(i);
        if (u < acc && d2(i) > 0.0) {
          pick = i;
          break;
        }
      }
      if (pick < 0) {
        for (Index i = n - 1; i >= 0; --i) {
          if (d2(i) > 0.0) {
            pick = i;
            break;
          }
        }
      }
    } else {
      // All remaining points coincide with a centroid; take an unused one.
      std::vector<Index> free;
      for (Index i = 0; i < n; ++i) {
        if (!chosen[static_cast<std::size_t>(i)]) free.push_back(i);
      }
      pick = free[rng.uniform_index(free.size())];
    }
    centroids.row(static_cast<Index>(r)) = x.row(pick);
    chosen[static_cast<std::size_t>(pick)] = true;
    for (Index i = 0; i < n; ++i) {
      d2(i) = std::min(d2(i), (x.row(i) - centroids.row(static_cast<Index>(r)))
                                  .squaredNorm());
    }
  }
  return centroids;
}

// Recomputes centroids as member means (ascending sample order). Empty
// clusters are reseeded at the point farthest from its current centroid.
void update_centroids(const Matrix& x, std::vector<std::size_t>& labels,
                      Vector& sq_dist, Matrix& centroids) {
  const auto q = static_cast<std::size_t>(centroids.rows());
  Matrix sums = Matrix::Zero(centroids.rows(), x.cols());
  std::vector<std::size_t> counts(q, 0);
  for (Index i = 0; i < x.rows(); ++i) {
    const auto g = labels[static_cast<std::size_t>(i)];
    sums.row(static_cast<Index>(g)) += x.row(i);
    ++counts[g];
  }
  for (std::size_t r = 0; r < q; ++r) {
    if (counts[r] > 0) {
      centroids.row(static_cast<Index>(r)) =
          sums.row(static_cast<Index>(r)) / static_cast<double>(counts[r]);
    }
  }
  for (std::size_t r = 0; r < q; ++r) {
    if (counts[r] > 0) continue;
    Index far = 0;
    double best = -1.0;
    for (Index i = 0; i < x.rows(); ++i) {
      // Never steal the last member of another cluster.
      if (counts[labels[static_cast<std::size_t>(i)]] <= 1) continue;
      if (sq_dist(i) > best) {
        best = sq_dist(i);
        far = i;
      }
    }
    if (best < 0.0) continue;
    centroids.row(static_cast<Index>(r)) = x.row(far);
    --counts[labels[static_cast<std::size_t>(far)]];
    labels[static_cast<std::size_t>(far)] = r;
    counts[r] = 1;
    sq_dist(far) = 0.0;
  }
}

}  // namespace

KMeansResult kmeans_single(const Matrix& x, const KMeansConfig& cfg,
                           std::uint64_t stream) {
  Rng rng = Rng(cfg.seed).split(stream);
  Matrix centroids = seed_plus_plus(x, cfg.q, rng);

  std::vector<std::size_t> labels;
  Vector sq_dist;
  KMeansResult res;
  double prev = std::numeric_limits<double>::infinity();
  std::size_t it = 0;
  for (; it < cfg.max_iter; ++it) {
    auto prev_labels = labels;
    kernels::omp::assign_nearest(x, centroids, labels, sq_dist);
    const double inertia = sq_dist.sum();
    res.inertia_trace.push_back(inertia);
    const bool stable = labels == prev_labels;
    const bool converged =
        std::isfinite(prev) &&
        (prev - inertia) <= cfg.tol * std::max(prev, std::numeric_limits<double>::min());
    if (stable || converged) {
      ++it;
      break;
    }
    prev = inertia;
    update_centroids(x, labels, sq_dist, centroids);
  }
  // Final centroids are the means of the final assignment.
  {
    Vector unused = sq_dist;
    update_centroids(x, labels, unused, centroids);
    kernels::omp::assign_nearest(x, centroids, labels, sq_dist);
    const double inertia = sq_dist.sum();
    if (inertia < res.inertia_trace.back()) res.inertia_trace.push_back(inertia);
  }
  res.inertia = res.inertia_trace.back();
  res.iterations = it;
  res.centroids = std::move(centroids);
  res.assignment = AnchorAssignment(std::move(labels), cfg.q);
  return res;
}

KMeansResult kmeans(const Matrix& x, const KMeansConfig& cfg) {
  if (cfg.q < 1) throw Error(ErrorKind::Config, "k-means needs q >= 1");
  if (cfg.max_iter < 1) throw Error(ErrorKind::Config, "k-means needs max_iter >= 1");
  if (!(cfg.tol > 0.0)) throw Error(ErrorKind::Config, "k-means needs tol > 0");
  if (x.rows() < 1 || x.cols() < 1) {
    throw Error(ErrorKind::Dimension, "k-means needs a non-empty data matrix");
  }
  if (static_cast<Index>(cfg.q) > x.rows()) {
    throw Error(ErrorKind::Config, "k-means q=" + std::to_string(cfg.q) +
                                       " exceeds n=" + std::to_string(x.rows()));
  }
  check_finite(x, "k-means input");

  const std::size_t restarts = std::max<std::size_t>(cfg.n_init, 1);
  std::vector<KMeansResult> runs(restarts);
  const auto nr = static_cast<long>(restarts);
#pragma omp parallel for schedule(dynamic)
  for (long r = 0; r < nr; ++r) {
    runs[static_cast<std::size_t>(r)] =
        kmeans_single(x, cfg, static_cast<std::uint64_t>(r));
  }
  std::size_t best = 0;
  for (std::size_t r = 1; r < restarts; ++r) {
    if (runs[r].inertia < runs[best].inertia) best = r;
  }
  return std::move(runs[best]);
}

Matrix clustering_features(const Matrix& x, const Vector& y,
                           bool include_target) {
  if (!include_target) return x;
  if (y.size() != x.rows()) {
    throw Error(ErrorKind::Dimension, "target length does not match x rows");
  }
  Matrix out(x.rows(), x.cols() + 1);
  out << x, y;
  return out;
}

AnchorAssignment equal_width_bins(const Vector& g, std::size_t q, double lo,
                                  double hi) {
  if (q < 1) throw Error(ErrorKind::Config, "binning needs q >= 1");
  if (!(hi > lo)) throw Error(ErrorKind::Config, "binning needs hi > lo");
  std::vector<std::size_t> labels(static_cast<std::size_t>(g.size()));
  const double qd = static_cast<double>(q);
  for (Index i = 0; i < g.size(); ++i) {
    const double v = g(i);
    if (!(v >= lo && v <= hi)) {
      throw Error(ErrorKind::Data, "sample " + std::to_string(i) + " value " +
                                       std::to_string(v) + " outside [" +
                                       std::to_string(lo) + ", " +
                                       std::to_string(hi) + "]");
    }
    const double scaled = (v - lo) / (hi - lo);
    const double r = std::ceil(qd * scaled);
    const auto bin = r <= 1.0 ? std::size_t{0} : static_cast<std::size_t>(r) - 1;
    labels[static_cast<std::size_t>(i)] = std::min(bin, q - 1);
  }
  return AnchorAssignment(std::move(labels), q);
}

AnchorAssignment equal_size_bins(const Vector& g, std::size_t q) {
  const auto n = static_cast<std::size_t>(g.size());
  if (q < 1) throw Error(ErrorKind::Config, "binning needs q >= 1");
  if (q > n) {
    throw Error(ErrorKind::Config, "equal-size binning q=" + std::to_string(q) +
                                       " exceeds n=" + std::to_string(n));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return g(static_cast<Index>(a)) < g(static_cast<Index>(b));
  });
  std::vector<std::size_t> labels(n);
  for (std::size_t pos = 0; pos < n; ++pos) {
    const std::size_t rank = pos + 1;
    // Smallest r with r * n / q >= rank.
    const std::size_t r = (rank * q + n - 1) / n;
    labels[order[pos]] = r - 1;
  }
  return AnchorAssignment(std::move(labels), q);
}

}  // namespace ada
