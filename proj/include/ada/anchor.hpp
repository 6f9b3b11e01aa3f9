#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "ada/types.hpp"

namespace ada {

/// Partition labels for n samples, optionally with per-sample weights.
///
/// Labels lie in [0, q). Weighted assignments scale each one-hot row of the
/// anchor matrix by the square root of the sample weight.
class AnchorAssignment {
 public:
  AnchorAssignment() = default;
  AnchorAssignment(std::vector<std::size_t> labels, std::size_t q,
                   std::optional<Vector> weights = std::nullopt);

  std::size_t size() const { return labels_.size(); }
  std::size_t q() const { return q_; }
  const std::vector<std::size_t>& labels() const { return labels_; }
  std::size_t label(std::size_t i) const { return labels_[i]; }
  bool weighted() const { return weights_.has_value(); }
  const std::optional<Vector>& weights() const { return weights_; }

  std::vector<std::size_t> group_sizes() const;

  // Assignment restricted to the given rows, keeping q (and weights).
  AnchorAssignment subset(std::span<const std::size_t> rows) const;

 private:
  std::vector<std::size_t> labels_;
  std::size_t q_ = 0;
  std::optional<Vector> weights_;
};

struct AnchorMatrix {
  Matrix a;  // n x q
};

AnchorMatrix build_anchor_matrix(const AnchorAssignment& assignment);

struct CompactProjection {
  AnchorAssignment assignment;
  std::vector<std::size_t> group_sizes;
};

struct DenseProjection {
  Matrix pi;  // n x n
};

/// Orthogonal projection onto the column space of an anchor matrix.
///
/// The compact form stores the partition and applies Pi as a group-mean
/// operator in O(n k). The dense form holds A (A^T A)^+ A^T explicitly and is
/// used for weighted anchors and as the reference in tests.
class ProjectionOperator {
 public:
  explicit ProjectionOperator(CompactProjection c) : rep_(std::move(c)) {}
  explicit ProjectionOperator(DenseProjection d) : rep_(std::move(d)) {}

  // Compact for unweighted assignments, dense otherwise.
  static ProjectionOperator from_assignment(const AnchorAssignment& assignment);

  bool is_compact() const {
    return std::holds_alternative<CompactProjection>(rep_);
  }
  const CompactProjection& compact() const {
    return std::get<CompactProjection>(rep_);
  }
  const DenseProjection& dense() const { return std::get<DenseProjection>(rep_); }

  std::size_t size() const;

  // Pi * m.
  Matrix apply(const Matrix& m) const;
  Vector apply(const Vector& v) const;

  double row_sum(std::size_t i) const;

  // Explicit n x n matrix, regardless of representation.
  Matrix to_dense() const;

 private:
  std::variant<CompactProjection, DenseProjection> rep_;
};

ProjectionOperator projection_compact(const AnchorAssignment& assignment);
ProjectionOperator projection_dense(const AnchorMatrix& a);

// Row i of the result is the mean of the rows of m sharing label(i). Sums run
// in ascending sample order so results are reproducible bit-for-bit.
Matrix project_group_mean(const AnchorAssignment& assignment, const Matrix& m);

double projection_row_sum(const ProjectionOperator& pi, std::size_t i);

}  // namespace ada
