#pragma once

#include "ada/anchor.hpp"
#include "ada/types.hpp"

namespace ada {

struct LinearModel {
  Vector coef;
  double intercept = 0.0;

  Vector predict(const Matrix& x) const;
};

// Least squares through the origin, minimum-norm when x is rank deficient.
Vector solve_least_squares(const Matrix& x, const Vector& y);

// All fits center (x, y) internally; the intercept is recovered from the means.
LinearModel fit_ols(const Matrix& x, const Vector& y);
LinearModel fit_ridge(const Matrix& x, const Vector& y, double lambda);

// ||(I - Pi) r||^2 + gamma ||Pi r||^2 with r = y - x b - intercept.
double anchor_loss(const LinearModel& b, const Matrix& x, const Vector& y,
                   const ProjectionOperator& pi, double gamma);

// Gradient of anchor_loss with respect to the coefficients.
Vector anchor_loss_gradient(const LinearModel& b, const Matrix& x,
                            const Vector& y, const ProjectionOperator& pi,
                            double gamma);

/// Anchor regression as OLS on the anchor-modified data
/// (x + (sqrt(gamma)-1) Pi x, y + (sqrt(gamma)-1) Pi y) after centering.
LinearModel fit_anchor_regression(const Matrix& x, const Vector& y,
                                  const AnchorAssignment& assignment,
                                  double gamma);

}  // namespace ada
