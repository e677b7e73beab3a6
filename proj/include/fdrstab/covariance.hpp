#pragma once

#include "fdrstab/rng.hpp"
#include "fdrstab/types.hpp"

namespace fdrstab {

// Population covariance structures used by the simulation designs.
struct CovarianceSpec {
  enum class Kind { Identity, CompoundSymmetry, BlockToeplitz };

  Kind kind = Kind::Identity;
  double rho = 0.0;      // in [0, 1) for the correlated kinds
  int block_size = 50;   // BlockToeplitz only

  static CovarianceSpec identity() { return {}; }
  static CovarianceSpec compound_symmetry(double rho) {
    return {Kind::CompoundSymmetry, rho, 0};
  }
  static CovarianceSpec block_toeplitz(double rho, int block_size = 50) {
    return {Kind::BlockToeplitz, rho, block_size};
  }
};

// Builds the p x p correlation matrix for a spec. BlockToeplitz has entries
// rho^|i-j| within each block and 0 across blocks; a trailing partial block
// of size p mod block_size is allowed.
Matrix materialize_covariance(const CovarianceSpec& spec, int p);

// Lower Cholesky factor. Throws NotPositiveDefinite on a nonpositive pivot.
Matrix cholesky(const Matrix& sigma);

// n i.i.d. rows from N(mean, L L^T) given the lower factor L.
Matrix sample_mvn(const Vector& mean, const Matrix& chol_lower, int n,
                  RngStream& rng);

}  // namespace fdrstab
