#include "ada/anchor.hpp"

#include <cmath>
#include <string>

#include "ada/kernels.hpp"

namespace ada {

void check_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    throw Error(ErrorKind::Numeric, std::string(what) + " has non-finite entries");
  }
}

void check_dataset(const Matrix& x, const Vector& y) {
  if (x.rows() < 1 || x.cols() < 1) {
    throw Error(ErrorKind::Dimension, "data matrix must be at least 1x1, got " +
                                          std::to_string(x.rows()) + "x" +
                                          std::to_string(x.cols()));
  }
  if (x.rows() != y.size()) {
    throw Error(ErrorKind::Dimension,
                "x has " + std::to_string(x.rows()) + " rows but y has " +
                    std::to_string(y.size()) + " entries");
  }
  check_finite(x, "x");
  check_finite(y, "y");
}

CenteredDataset center_dataset(const Matrix& x, const Vector& y) {
  check_dataset(x, y);
  CenteredDataset ds;
  ds.x_mean = x.colwise().mean().transpose();
  ds.y_mean = y.mean();
  ds.x = x.rowwise() - ds.x_mean.transpose();
  ds.y = y.array() - ds.y_mean;
  return ds;
}

CenteredDataset center_like(const CenteredDataset& reference, const Matrix& x,
                            const Vector& y) {
  if (x.rows() != y.size() || x.cols() != reference.x_mean.size()) {
    throw Error(ErrorKind::Dimension, "split shape does not match reference");
  }
  CenteredDataset ds;
  ds.x_mean = reference.x_mean;
  ds.y_mean = reference.y_mean;
  ds.x = x.rowwise() - ds.x_mean.transpose();
  ds.y = y.array() - ds.y_mean;
  return ds;
}

std::pair<Matrix, Vector> uncenter(const CenteredDataset& ds) {
  Matrix x = ds.x.rowwise() + ds.x_mean.transpose();
  Vector y = ds.y.array() + ds.y_mean;
  return {std::move(x), std::move(y)};
}

AnchorAssignment::AnchorAssignment(std::vector<std::size_t> labels,
                                   std::size_t q, std::optional<Vector> weights)
    : labels_(std::move(labels)), q_(q), weights_(std::move(weights)) {
  if (q_ < 1) throw Error(ErrorKind::Config, "anchor assignment needs q >= 1");
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] >= q_) {
      throw Error(ErrorKind::OutOfRange,
                  "label " + std::to_string(labels_[i]) + " at sample " +
                      std::to_string(i) + " is not below q=" + std::to_string(q_));
    }
  }
  if (weights_) {
    if (static_cast<std::size_t>(weights_->size()) != labels_.size()) {
      throw Error(ErrorKind::Dimension, "weights length " +
                                            std::to_string(weights_->size()) +
                                            " != labels length " +
                                            std::to_string(labels_.size()));
    }
    for (Index i = 0; i < weights_->size(); ++i) {
      const double w = (*weights_)(i);
      if (!(w > 0.0) || !std::isfinite(w)) {
        throw Error(ErrorKind::Data,
                    "weight at sample " + std::to_string(i) + " must be positive");
      }
    }
  }
}

std::vector<std::size_t> AnchorAssignment::group_sizes() const {
  std::vector<std::size_t> sizes(q_, 0);
  for (auto l : labels_) ++sizes[l];
  return sizes;
}

AnchorAssignment AnchorAssignment::subset(
    std::span<const std::size_t> rows) const {
  std::vector<std::size_t> labels;
  labels.reserve(rows.size());
  std::optional<Vector> w;
  if (weights_) w = Vector(static_cast<Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k] >= labels_.size()) {
      throw Error(ErrorKind::OutOfRange,
                  "row " + std::to_string(rows[k]) + " outside assignment of size " +
                      std::to_string(labels_.size()));
    }
    labels.push_back(labels_[rows[k]]);
    if (w) (*w)(static_cast<Index>(k)) = (*weights_)(static_cast<Index>(rows[k]));
  }
  return AnchorAssignment(std::move(labels), q_, std::move(w));
}

AnchorMatrix build_anchor_matrix(const AnchorAssignment& assignment) {
  const auto n = static_cast<Index>(assignment.size());
  AnchorMatrix out{Matrix::Zero(n, static_cast<Index>(assignment.q()))};
  for (Index i = 0; i < n; ++i) {
    const double v =
        assignment.weighted() ? std::sqrt((*assignment.weights())(i)) : 1.0;
    out.a(i, static_cast<Index>(assignment.label(static_cast<std::size_t>(i)))) = v;
  }
  return out;
}

ProjectionOperator ProjectionOperator::from_assignment(
    const AnchorAssignment& assignment) {
  if (assignment.weighted()) {
    return projection_dense(build_anchor_matrix(assignment));
  }
  return projection_compact(assignment);
}

std::size_t ProjectionOperator::size() const {
  if (is_compact()) return compact().assignment.size();
  return static_cast<std::size_t>(dense().pi.rows());
}

Matrix ProjectionOperator::apply(const Matrix& m) const {
  if (static_cast<std::size_t>(m.rows()) != size()) {
    throw Error(ErrorKind::Dimension,
                "projection of size " + std::to_string(size()) +
                    " applied to matrix with " + std::to_string(m.rows()) + " rows");
  }
  if (is_compact()) {
    const auto& c = compact();
    return kernels::omp::group_mean(c.assignment.labels(), c.assignment.q(), m);
  }
  return kernels::omp::dense_apply(dense().pi, m);
}

Vector ProjectionOperator::apply(const Vector& v) const {
  Matrix m = v;
  return apply(m).col(0);
}

double ProjectionOperator::row_sum(std::size_t i) const {
  if (i >= size()) {
    throw Error(ErrorKind::OutOfRange, "row " + std::to_string(i) +
                                           " outside projection of size " +
                                           std::to_string(size()));
  }
  // Every row of an unweighted group-mean operator averages its group.
  if (is_compact()) return 1.0;
  const auto& pi = dense().pi;
  double s = 0.0;
  for (Index j = 0; j < pi.cols(); ++j) s += pi(static_cast<Index>(i), j);
  return s;
}

Matrix ProjectionOperator::to_dense() const {
  if (!is_compact()) return dense().pi;
  const auto& c = compact();
  const auto n = static_cast<Index>(c.assignment.size());
  Matrix pi = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    const auto gi = c.assignment.label(static_cast<std::size_t>(i));
    const double v = 1.0 / static_cast<double>(c.group_sizes[gi]);
    for (Index j = 0; j < n; ++j) {
      if (c.assignment.label(static_cast<std::size_t>(j)) == gi) pi(i, j) = v;
    }
  }
  return pi;
}

ProjectionOperator projection_compact(const AnchorAssignment& assignment) {
  if (assignment.weighted()) {
    throw Error(ErrorKind::Config,
                "compact projection requires an unweighted assignment");
  }
  return ProjectionOperator(
      CompactProjection{assignment, assignment.group_sizes()});
}

ProjectionOperator projection_dense(const AnchorMatrix& a) {
  check_finite(a.a, "anchor matrix");
  const Matrix gram = a.a.transpose() * a.a;
  const Matrix gram_pinv =
      Eigen::CompleteOrthogonalDecomposition<Matrix>(gram).pseudoInverse();
  Matrix pi = a.a * gram_pinv * a.a.transpose();
  // Symmetrize away rounding asymmetry from the triple product.
  pi = 0.5 * (pi + pi.transpose()).eval();
  return ProjectionOperator(DenseProjection{std::move(pi)});
}

Matrix project_group_mean(const AnchorAssignment& assignment, const Matrix& m) {
  if (static_cast<Index>(assignment.size()) != m.rows()) {
    throw Error(ErrorKind::Dimension,
                "assignment covers " + std::to_string(assignment.size()) +
                    " samples but matrix has " + std::to_string(m.rows()) + " rows");
  }
  return kernels::omp::group_mean(assignment.labels(), assignment.q(), m);
}

double projection_row_sum(const ProjectionOperator& pi, std::size_t i) {
  return pi.row_sum(i);
}

}  // namespace ada
