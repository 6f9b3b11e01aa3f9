#include "ada/kernels.hpp"

#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ada::kernels {

namespace {

// Per-group column sums in ascending sample order for a single column.
void column_group_sums(std::span<const std::size_t> labels, const Matrix& m,
                       Index col, std::vector<double>& sums) {
  std::fill(sums.begin(), sums.end(), 0.0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    sums[labels[i]] += m(static_cast<Index>(i), col);
  }
}

std::vector<std::size_t> counts_of(std::span<const std::size_t> labels,
                                   std::size_t q) {
  std::vector<std::size_t> counts(q, 0);
  for (auto l : labels) ++counts[l];
  return counts;
}

inline double sq_distance(const Matrix& x, Index i, const Matrix& c, Index r) {
  double s = 0.0;
  for (Index j = 0; j < x.cols(); ++j) {
    const double d = x(i, j) - c(r, j);
    s += d * d;
  }
  return s;
}

inline void nearest_one(const Matrix& x, Index i, const Matrix& centroids,
                        std::size_t& label, double& dist) {
  double best = std::numeric_limits<double>::infinity();
  Index best_r = 0;
  for (Index r = 0; r < centroids.rows(); ++r) {
    const double d = sq_distance(x, i, centroids, r);
    if (d < best) {
      best = d;
      best_r = r;
    }
  }
  label = static_cast<std::size_t>(best_r);
  dist = best;
}

}  // namespace

namespace serial {

Matrix group_mean(std::span<const std::size_t> labels, std::size_t q,
                  const Matrix& m) {
  const auto counts = counts_of(labels, q);
  Matrix out(m.rows(), m.cols());
  std::vector<double> sums(q);
  for (Index c = 0; c < m.cols(); ++c) {
    column_group_sums(labels, m, c, sums);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const auto g = labels[i];
      out(static_cast<Index>(i), c) = sums[g] / static_cast<double>(counts[g]);
    }
  }
  return out;
}

void assign_nearest(const Matrix& x, const Matrix& centroids,
                    std::vector<std::size_t>& labels, Vector& sq_dist) {
  labels.resize(static_cast<std::size_t>(x.rows()));
  sq_dist.resize(x.rows());
  for (Index i = 0; i < x.rows(); ++i) {
    nearest_one(x, i, centroids, labels[static_cast<std::size_t>(i)],
                sq_dist(i));
  }
}

Matrix dense_apply(const Matrix& pi, const Matrix& m) {
  Matrix out(pi.rows(), m.cols());
  for (Index i = 0; i < pi.rows(); ++i) {
    for (Index c = 0; c < m.cols(); ++c) {
      double s = 0.0;
      for (Index j = 0; j < pi.cols(); ++j) s += pi(i, j) * m(j, c);
      out(i, c) = s;
    }
  }
  return out;
}

}  // namespace serial

namespace omp {

Matrix group_mean(std::span<const std::size_t> labels, std::size_t q,
                  const Matrix& m) {
  const auto counts = counts_of(labels, q);
  const Index n = m.rows();
  const Index k = m.cols();
  Matrix sums(static_cast<Index>(q), k);
#pragma omp parallel if (k > 1)
  {
    std::vector<double> col(q);
#pragma omp for schedule(static)
    for (Index c = 0; c < k; ++c) {
      column_group_sums(labels, m, c, col);
      for (std::size_t g = 0; g < q; ++g) sums(static_cast<Index>(g), c) = col[g];
    }
  }
  Matrix out(n, k);
#pragma omp parallel for schedule(static) if (n > 4096)
  for (Index i = 0; i < n; ++i) {
    const auto g = labels[static_cast<std::size_t>(i)];
    const double cnt = static_cast<double>(counts[g]);
    for (Index c = 0; c < k; ++c) out(i, c) = sums(static_cast<Index>(g), c) / cnt;
  }
  return out;
}

void assign_nearest(const Matrix& x, const Matrix& centroids,
                    std::vector<std::size_t>& labels, Vector& sq_dist) {
  labels.resize(static_cast<std::size_t>(x.rows()));
  sq_dist.resize(x.rows());
  const Index n = x.rows();
#pragma omp parallel for schedule(static) if (n > 1024)
  for (Index i = 0; i < n; ++i) {
    nearest_one(x, i, centroids, labels[static_cast<std::size_t>(i)],
                sq_dist(i));
  }
}

Matrix dense_apply(const Matrix& pi, const Matrix& m) {
  Matrix out(pi.rows(), m.cols());
  const Index n = pi.rows();
#pragma omp parallel for schedule(static) if (n > 256)
  for (Index i = 0; i < n; ++i) {
    for (Index c = 0; c < m.cols(); ++c) {
      double s = 0.0;
      for (Index j = 0; j < pi.cols(); ++j) s += pi(i, j) * m(j, c);
      out(i, c) = s;
    }
  }
  return out;
}

}  // namespace omp

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

}  // namespace ada::kernels
