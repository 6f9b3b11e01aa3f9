#pragma once

#include <cstdint>
#include <vector>

#include "ada/anchor.hpp"
#include "ada/types.hpp"

namespace ada {

struct KMeansConfig {
  std::size_t q = 8;
  std::size_t max_iter = 300;
  double tol = 1e-6;  // relative inertia change
  std::uint64_t seed = 0;
  std::size_t n_init = 10;
};

struct KMeansResult {
  AnchorAssignment assignment;
  Matrix centroids;  // q x d
  double inertia = 0.0;
  std::size_t iterations = 0;
  // Inertia after every assignment step of the winning restart.
  std::vector<double> inertia_trace;
};

/// Lloyd's algorithm with k-means++ seeding, best of cfg.n_init restarts.
///
/// Restarts draw from independent streams derived from cfg.seed and may run in
/// parallel; the winner is the lowest inertia, ties going to the lower restart
/// index, so the result does not depend on the thread count.
KMeansResult kmeans(const Matrix& x, const KMeansConfig& cfg);

// Single restart from a given generator stream. Exposed for tests.
KMeansResult kmeans_single(const Matrix& x, const KMeansConfig& cfg,
                           std::uint64_t stream);

// Features to cluster on: x alone, or x with the target appended as a column.
Matrix clustering_features(const Matrix& x, const Vector& y, bool include_target);

AnchorAssignment equal_width_bins(const Vector& g, std::size_t q, double lo,
                                  double hi);

AnchorAssignment equal_size_bins(const Vector& g, std::size_t q);

}  // namespace ada
