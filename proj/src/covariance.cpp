#include "fdrstab/covariance.hpp"

#include <cmath>
#include <string>

namespace fdrstab {

Matrix materialize_covariance(const CovarianceSpec& spec, int p) {
  Matrix sigma = Matrix::Identity(p, p);
  switch (spec.kind) {
    case CovarianceSpec::Kind::Identity:
      break;
    case CovarianceSpec::Kind::CompoundSymmetry:
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
          if (i != j) sigma(i, j) = spec.rho;
      break;
    case CovarianceSpec::Kind::BlockToeplitz: {
      int b = spec.block_size;
      for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) {
          if (i != j && i / b == j / b)
            sigma(i, j) = std::pow(spec.rho, std::abs(i - j));
        }
      }
      break;
    }
  }
  return sigma;
}

Matrix cholesky(const Matrix& sigma) {
  const int p = static_cast<int>(sigma.rows());
  Matrix lower = Matrix::Zero(p, p);
  for (int j = 0; j < p; ++j) {
    double diag = sigma(j, j) - lower.row(j).head(j).squaredNorm();
    if (diag <= 0.0) {
      throw NotPositiveDefinite("cholesky: nonpositive pivot at column " +
                                std::to_string(j));
    }
    lower(j, j) = std::sqrt(diag);
    for (int i = j + 1; i < p; ++i) {
      double s = sigma(i, j) - lower.row(i).head(j).dot(lower.row(j).head(j));
      lower(i, j) = s / lower(j, j);
    }
  }
  return lower;
}

Matrix sample_mvn(const Vector& mean, const Matrix& chol_lower, int n,
                  RngStream& rng) {
  const int p = static_cast<int>(chol_lower.rows());
  Matrix z(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) z(i, j) = rng.normal();
  Matrix x = z * chol_lower.transpose();
  x.rowwise() += mean.transpose();
  return x;
}

}  // namespace fdrstab
