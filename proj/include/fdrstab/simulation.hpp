#pragma once

#include <string>

#include "fdrstab/covariance.hpp"
#include "fdrstab/rng.hpp"
#include "fdrstab/types.hpp"

namespace fdrstab {

// Distribution of the nonzero regression coefficients.
struct SignalLaw {
  enum class Kind { GaussianScaled, UniformTwoSided };

  Kind kind = Kind::GaussianScaled;
  double delta = 5.0;  // GaussianScaled: sd = delta * sqrt(log p / n)
  double lo = 0.1;     // UniformTwoSided: |beta| uniform on [lo, hi],
  double hi = 1.5;     // sign uniform

  static SignalLaw gaussian_scaled(double delta) {
    SignalLaw law;
    law.kind = Kind::GaussianScaled;
    law.delta = delta;
    return law;
  }
  static SignalLaw uniform_two_sided(double lo, double hi) {
    SignalLaw law;
    law.kind = Kind::UniformTwoSided;
    law.lo = lo;
    law.hi = hi;
    return law;
  }
};

struct ScenarioConfig {
  std::string name;
  int n = 0;
  int p = 0;
  int s = 0;
  SignalLaw signal;
  CovarianceSpec covariance;
  double q = 0.1;
  int M = 50;
  int reps = 200;
  std::uint64_t master_seed = 1;
};

struct GeneratedDataset {
  Matrix X;
  Vector y;
  Vector beta;
  SelectionSet true_support;
};

// One realized dataset, deterministic in (config.master_seed, rep_index).
// The covariance Cholesky factor may be precomputed and shared across reps.
GeneratedDataset gen_dataset(const ScenarioConfig& config, int rep_index,
                             const Matrix* chol_lower = nullptr);

// The introductory linear-model example: n=500, p=200, s=30 signals from
// Unif(-1.5,-0.1) u Unif(0.1,1.5), compound symmetry rho=0.5, q=0.1, M=50.
ScenarioConfig toy_scenario();

// The full simulation grid: (n,p) pairs x signal strengths x correlation
// sweeps for both covariance families, s=50 throughout.
std::vector<ScenarioConfig> paper_grid();

}  // namespace fdrstab
