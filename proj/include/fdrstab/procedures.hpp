#pragma once

#include <optional>

#include "fdrstab/covariance.hpp"
#include "fdrstab/rng.hpp"
#include "fdrstab/types.hpp"

namespace fdrstab {

// One run of a base FDR-controlling procedure. stats holds the feature
// importance vector T; selected is exactly the s_hat top-ranked features
// after tie-breaking; run_evalues carries the per-run relaxed e-values
// (s_hat nonzero entries, each p / (q * max(s_hat, 1))).
struct BaseRunResult {
  Vector stats;
  int s_hat = 0;
  SelectionSet selected;
  Vector run_evalues;
  std::optional<Vector> rb_evalues;  // knockoff runs only
};

// Benjamini-Hochberg step-up on p-values at level q.
SelectionSet bh_select(const Vector& pvals, double q);

// Benjamini-Yekutieli: BH at level q / H_p with H_p the harmonic number.
SelectionSet by_select(const Vector& pvals, double q);

// e-BH: rejects {i : e_i >= p/(q k_hat)} with
// k_hat = max{k : e_(k) >= p/(q k)}, 0 when no k qualifies.
SelectionSet ebh_select(const Vector& evals, double q);

// Equicorrelated Model-X Gaussian knockoff copy of X with marginal
// covariance sigma. s_j = min(1, 2 lambda_min(sigma)) uniformly; the s
// vector is shrunk in small steps if the conditional covariance fails to
// factor.
Matrix gaussian_knockoffs(const Matrix& X, const Matrix& sigma,
                          RngStream& rng);

// Lasso coefficient-difference statistics W_j = |b_j| - |b_{j+p}| from one
// cross-validated fit on the augmented [X, X_knock] design.
Vector knockoff_stats(const Matrix& X, const Matrix& X_knock, const Vector& y,
                      RngStream& rng);

// Smallest t among {|W_j| : W_j != 0} with
// (offset + #{W <= -t}) / max(#{W >= t}, 1) <= q; +inf if none.
double knockoff_threshold(const Vector& W, double q, int offset);

// Relaxed e-values of the knockoff filter run at level q_kn:
// e_i = p 1{W_i >= tau} / (1 + #{W <= -tau}); all zeros when tau = +inf.
Vector rb_evalues(const Vector& W, double q_kn);

// Knockoff+ base run (offset 1). rb_evalues attached at level q_kn.
BaseRunResult knockoff_run(const Matrix& X, const Vector& y,
                           const Matrix& sigma, double q, RngStream& rng,
                           double q_kn = -1.0 /* default q/2 */);

// Data-splitting base run: lasso on one half, OLS on the lasso support on
// the other half, mirror statistics T_i = sign(b1 b2) |b1||b2|, selection by
// the mirror threshold with offset 0.
BaseRunResult ds_run(const Matrix& X, const Vector& y, double q,
                     RngStream& rng);

// Split-BH base run: lasso screening on one half, OLS p-values on the other
// half restricted to the screened set (p = 1 off the set), T = -P, BH
// selection at level q.
BaseRunResult splitbh_run(const Matrix& X, const Vector& y, double q,
                          RngStream& rng);

// Ranks of T descending (rank 1 = strongest evidence), ties broken by noise
// drawn from tie_rng. Exposed for the aggregation layer.
std::vector<int> rank_descending(const Vector& stats, RngStream& tie_rng);

}  // namespace fdrstab
