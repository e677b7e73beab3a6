#pragma once

#include "fdrstab/rng.hpp"
#include "fdrstab/types.hpp"

namespace fdrstab {

struct LassoFit {
  Vector coefficients;               // original scale
  double intercept = 0.0;
  double lambda = 0.0;
  int n_iterations = 0;
  bool converged = false;
  std::vector<int> degenerate_columns;  // zero-variance columns, forced to 0
};

// Minimizes (1/2n)||y - b0 - X beta||^2 + lambda ||beta||_1 by cyclic
// coordinate descent. Columns are standardized to unit 1/n-variance
// internally; coefficients are reported on the original scale.
LassoFit lasso_fit(const Matrix& X, const Vector& y, double lambda,
                   double tol = 1e-8, int max_iter = 10000);

// Fits a log-spaced lambda path from lambda_max down by a factor of 1e-3,
// picks the lambda minimizing mean out-of-fold squared error over n_folds
// random folds, and refits on the full data.
LassoFit lasso_cv(const Matrix& X, const Vector& y, int n_folds,
                  int n_lambdas, RngStream& rng);

}  // namespace fdrstab
