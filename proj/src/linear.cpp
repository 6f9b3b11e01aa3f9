#include "ada/linear.hpp"

#include <string>

#include "ada/augment.hpp"

namespace ada {

Vector LinearModel::predict(const Matrix& x) const {
  if (x.cols() != coef.size()) {
    throw Error(ErrorKind::Dimension, "model has " + std::to_string(coef.size()) +
                                          " coefficients, input has " +
                                          std::to_string(x.cols()) + " columns");
  }
  Vector out = x * coef;
  out.array() += intercept;
  return out;
}

Vector solve_least_squares(const Matrix& x, const Vector& y) {
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(x);
  return cod.solve(y);
}

LinearModel fit_ols(const Matrix& x, const Vector& y) {
  const auto ds = center_dataset(x, y);
  LinearModel m;
  m.coef = solve_least_squares(ds.x, ds.y);
  m.intercept = ds.y_mean - ds.x_mean.dot(m.coef);
  return m;
}

LinearModel fit_ridge(const Matrix& x, const Vector& y, double lambda) {
  if (!(lambda >= 0.0)) {
    throw Error(ErrorKind::Config, "ridge needs lambda >= 0");
  }
  if (lambda == 0.0) return fit_ols(x, y);
  const auto ds = center_dataset(x, y);
  Matrix gram = ds.x.transpose() * ds.x;
  gram.diagonal().array() += lambda;
  LinearModel m;
  m.coef = gram.ldlt().solve(ds.x.transpose() * ds.y);
  m.intercept = ds.y_mean - ds.x_mean.dot(m.coef);
  return m;
}

namespace {

Vector residual(const LinearModel& b, const Matrix& x, const Vector& y) {
  if (x.rows() != y.size()) {
    throw Error(ErrorKind::Dimension, "x rows and y length differ");
  }
  return y - b.predict(x);
}

}  // namespace

double anchor_loss(const LinearModel& b, const Matrix& x, const Vector& y,
                   const ProjectionOperator& pi, double gamma) {
  if (!(gamma >= 0.0)) throw Error(ErrorKind::Config, "gamma must be >= 0");
  const Vector r = residual(b, x, y);
  const Vector pr = pi.apply(r);
  return (r - pr).squaredNorm() + gamma * pr.squaredNorm();
}

Vector anchor_loss_gradient(const LinearModel& b, const Matrix& x,
                            const Vector& y, const ProjectionOperator& pi,
                            double gamma) {
  const Vector r = residual(b, x, y);
  const Vector pr = pi.apply(r);
  // d/db of r^T ((I - Pi) + gamma Pi) r, using Pi^2 = Pi.
  const Vector wr = (r - pr) + gamma * pr;
  return -2.0 * x.transpose() * wr;
}

LinearModel fit_anchor_regression(const Matrix& x, const Vector& y,
                                  const AnchorAssignment& assignment,
                                  double gamma) {
  const auto ds = center_dataset(x, y);
  const auto pi = ProjectionOperator::from_assignment(assignment);
  const auto t = ar_transform(ds.x, ds.y, pi, gamma);
  LinearModel m;
  m.coef = solve_least_squares(t.x, t.y);
  m.intercept = ds.y_mean - ds.x_mean.dot(m.coef);
  return m;
}

}  // namespace ada
