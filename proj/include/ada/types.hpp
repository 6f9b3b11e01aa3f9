#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ada {

// Rows are samples, columns are features.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

enum class ErrorKind {
  Config,
  Data,
  Dimension,
  OutOfRange,
  Numeric,
  Divergence,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Throws Dimension/Numeric errors when (x, y) violate the DataMatrix and
// TargetVector invariants.
void check_dataset(const Matrix& x, const Vector& y);
void check_finite(const Matrix& m, const char* what);

struct CenteredDataset {
  Matrix x;
  Vector y;
  Vector x_mean;
  double y_mean = 0.0;

  Index n() const { return x.rows(); }
  Index d() const { return x.cols(); }
};

CenteredDataset center_dataset(const Matrix& x, const Vector& y);

// Applies the stored means of `reference` to another split, so validation and
// test data live in the same coordinates as the training data.
CenteredDataset center_like(const CenteredDataset& reference, const Matrix& x,
                            const Vector& y);

std::pair<Matrix, Vector> uncenter(const CenteredDataset& ds);

}  // namespace ada
