#pragma once

// Reference computations used only by tests. Each one takes a deliberately
// different route from the library code it checks.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "ada/rng.hpp"
#include "ada/types.hpp"

namespace oracle {

using ada::Index;
using ada::Matrix;
using ada::Vector;

// Moore-Penrose pseudo-inverse through a thresholded SVD.
inline Matrix pinv_svd(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double tol = std::max(m.rows(), m.cols()) * (s.size() ? s(0) : 0.0) *
                     std::numeric_limits<double>::epsilon();
  Matrix sinv = Matrix::Zero(m.cols(), m.rows());
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) > tol) sinv(i, i) = 1.0 / s(i);
  }
  return svd.matrixV() * sinv * svd.matrixU().transpose();
}

inline Matrix projection_svd(const Matrix& a) {
  return a * pinv_svd(a.transpose() * a) * a.transpose();
}

// Group means by explicit membership scan, O(n^2).
inline Matrix naive_group_mean(const std::vector<std::size_t>& labels, const Matrix& m) {
  Matrix out(m.rows(), m.cols());
  for (Index i = 0; i < m.rows(); ++i) {
    Eigen::RowVectorXd s = Eigen::RowVectorXd::Zero(m.cols());
    double cnt = 0;
    for (Index j = 0; j < m.rows(); ++j) {
      if (labels[static_cast<std::size_t>(j)] == labels[static_cast<std::size_t>(i)]) {
        s += m.row(j);
        cnt += 1;
      }
    }
    out.row(i) = s / cnt;
  }
  return out;
}

inline std::vector<std::size_t> random_labels(std::size_t n, std::size_t q, ada::Rng& rng) {
  std::vector<std::size_t> l(n);
  for (auto& v : l) v = rng.uniform_index(q);
  return l;
}

inline Matrix random_matrix(Index r, Index c, ada::Rng& rng) {
  Matrix m(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) m(i, j) = rng.normal();
  return m;
}

inline Vector random_vector(Index n, ada::Rng& rng) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = rng.normal();
  return v;
}

// Central finite difference of f around x along every coordinate.
template <typename F>
Vector numeric_gradient(F f, Vector x, double h) {
  Vector g(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    const double orig = x(i);
    x(i) = orig + h;
    const double fp = f(x);
    x(i) = orig - h;
    const double fm = f(x);
    x(i) = orig;
    g(i) = (fp - fm) / (2 * h);
  }
  return g;
}

}  // namespace oracle
