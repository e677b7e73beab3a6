#pragma once

#include "fdrstab/types.hpp"

namespace fdrstab {

// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

// Upper-tail probability P(T_df > t) for Student's t.
double student_t_sf(double t, double df);

// Linear-interpolation empirical quantile (continuous type, h = (n-1)g + 1).
double quantile(const std::vector<double>& values, double gamma);

// Two-sided OLS t-test p-values for each column of X (intercept added
// internally, df = n - k - 1). Throws SingularDesign when X^T X (with
// intercept) is rank deficient.
Vector ols_pvalues(const Matrix& X, const Vector& y);

}  // namespace fdrstab
