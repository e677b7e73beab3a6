#include "fdrstab/simulation.hpp"

#include <cmath>
#include <numeric>

namespace fdrstab {

namespace {

// Stream ids for the independent randomness sources within one replication.
constexpr std::uint64_t kSupportStream = 1;
constexpr std::uint64_t kBetaStream = 2;
constexpr std::uint64_t kDesignStream = 3;
constexpr std::uint64_t kNoiseStream = 4;

}  // namespace

GeneratedDataset gen_dataset(const ScenarioConfig& config, int rep_index,
                             const Matrix* chol_lower) {
  const int n = config.n;
  const int p = config.p;
  RngStream rep_root(config.master_seed,
                     0x64617461ULL ^ (static_cast<std::uint64_t>(rep_index) << 8));

  GeneratedDataset d;

  // Support: uniform without replacement via partial Fisher-Yates.
  RngStream support_rng = rep_root.substream(kSupportStream);
  std::vector<int> pool(p);
  std::iota(pool.begin(), pool.end(), 0);
  for (int k = 0; k < config.s; ++k) {
    int j = k + static_cast<int>(support_rng.uniform_below(p - k));
    std::swap(pool[k], pool[j]);
  }
  std::vector<int> support(pool.begin(), pool.begin() + config.s);
  d.true_support = SelectionSet(support, p);

  RngStream beta_rng = rep_root.substream(kBetaStream);
  d.beta = Vector::Zero(p);
  for (int i : d.true_support.indices) {
    switch (config.signal.kind) {
      case SignalLaw::Kind::GaussianScaled: {
        double sd = config.signal.delta *
                    std::sqrt(std::log(static_cast<double>(p)) / n);
        d.beta(i) = sd * beta_rng.normal();
        break;
      }
      case SignalLaw::Kind::UniformTwoSided: {
        double mag = config.signal.lo +
                     (config.signal.hi - config.signal.lo) * beta_rng.uniform();
        double sign = beta_rng.uniform() < 0.5 ? -1.0 : 1.0;
        d.beta(i) = sign * mag;
        break;
      }
    }
  }

  RngStream design_rng = rep_root.substream(kDesignStream);
  Matrix lower;
  if (chol_lower == nullptr) {
    lower = cholesky(materialize_covariance(config.covariance, p));
    chol_lower = &lower;
  }
  d.X = sample_mvn(Vector::Zero(p), *chol_lower, n, design_rng);

  RngStream noise_rng = rep_root.substream(kNoiseStream);
  d.y = d.X * d.beta;
  for (int i = 0; i < n; ++i) d.y(i) += noise_rng.normal();
  return d;
}

ScenarioConfig toy_scenario() {
  ScenarioConfig c;
  c.name = "toy";
  c.n = 500;
  c.p = 200;
  c.s = 30;
  c.signal = SignalLaw::uniform_two_sided(0.1, 1.5);
  c.covariance = CovarianceSpec::compound_symmetry(0.5);
  c.q = 0.1;
  c.M = 50;
  return c;
}

std::vector<ScenarioConfig> paper_grid() {
  const std::vector<std::pair<int, int>> sizes = {
      {500, 500}, {800, 1000}, {800, 2000}, {2000, 800}, {3000, 500}};
  const std::vector<double> deltas = {2.0, 5.0, 8.0};
  const std::vector<double> toeplitz_rhos = {0.1, 0.2, 0.3, 0.4,
                                             0.5, 0.6, 0.7, 0.8};
  const std::vector<double> cs_rhos = {0.1, 0.2, 0.3, 0.4, 0.5,
                                       0.6, 0.7, 0.8, 0.9};

  std::vector<ScenarioConfig> grid;
  for (auto [n, p] : sizes) {
    for (double delta : deltas) {
      for (double rho : toeplitz_rhos) {
        ScenarioConfig c;
        c.n = n;
        c.p = p;
        c.s = 50;
        c.signal = SignalLaw::gaussian_scaled(delta);
        c.covariance = CovarianceSpec::block_toeplitz(rho);
        c.name = "n" + std::to_string(n) + "_p" + std::to_string(p) +
                 "_d" + std::to_string(static_cast<int>(delta)) +
                 "_toeplitz_rho" + std::to_string(rho).substr(0, 3);
        grid.push_back(c);
      }
      for (double rho : cs_rhos) {
        ScenarioConfig c;
        c.n = n;
        c.p = p;
        c.s = 50;
        c.signal = SignalLaw::gaussian_scaled(delta);
        c.covariance = CovarianceSpec::compound_symmetry(rho);
        c.name = "n" + std::to_string(n) + "_p" + std::to_string(p) +
                 "_d" + std::to_string(static_cast<int>(delta)) +
                 "_cs_rho" + std::to_string(rho).substr(0, 3);
        grid.push_back(c);
      }
    }
  }
  return grid;
}

}  // namespace fdrstab
