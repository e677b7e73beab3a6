#include "fdrstab/procedures.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fdrstab/lasso.hpp"
#include "fdrstab/stats.hpp"

namespace fdrstab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Half/half index split, sizes floor(n/2) and ceil(n/2).
void split_indices(int n, RngStream& rng, std::vector<int>& first,
                   std::vector<int>& second) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  int half = n / 2;
  first.assign(order.begin(), order.begin() + half);
  second.assign(order.begin() + half, order.end());
}

Matrix subset_rows(const Matrix& X, const std::vector<int>& rows) {
  Matrix out(rows.size(), X.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(i) = X.row(rows[i]);
  return out;
}

Vector subset(const Vector& v, const std::vector<int>& idx) {
  Vector out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out(i) = v(idx[i]);
  return out;
}

Matrix subset_cols(const Matrix& X, const std::vector<int>& cols) {
  Matrix out(X.rows(), cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(j) = X.col(cols[j]);
  return out;
}

// OLS coefficients with intercept; intercept is dropped from the output.
Vector ols_coef(const Matrix& X, const Vector& y) {
  const int n = static_cast<int>(X.rows());
  const int k = static_cast<int>(X.cols());
  Matrix design(n, k + 1);
  design.col(0).setOnes();
  design.rightCols(k) = X;
  Eigen::FullPivLU<Matrix> lu(design.transpose() * design);
  if (!lu.isInvertible()) throw SingularDesign("ols_coef: singular design");
  Vector beta = lu.solve(design.transpose() * y);
  return beta.tail(k);
}

// Keeps the support OLS-estimable: caps its size below the half-sample df
// limit and drops collinear columns (smallest screening coefficient first).
std::vector<int> trim_support(std::vector<int> support, const Vector& screen_coef,
                              const Matrix& X2, int max_size) {
  auto by_coef_desc = [&](int a, int b) {
    return std::abs(screen_coef(a)) > std::abs(screen_coef(b));
  };
  if (static_cast<int>(support.size()) > max_size) {
    std::sort(support.begin(), support.end(), by_coef_desc);
    support.resize(std::max(max_size, 0));
    std::sort(support.begin(), support.end());
  }
  while (!support.empty()) {
    Matrix sub = subset_cols(X2, support);
    Matrix design(sub.rows(), sub.cols() + 1);
    design.col(0).setOnes();
    design.rightCols(sub.cols()) = sub;
    Eigen::FullPivLU<Matrix> lu(design.transpose() * design);
    if (lu.isInvertible()) break;
    auto weakest = std::min_element(support.begin(), support.end(),
                                    [&](int a, int b) {
                                      return std::abs(screen_coef(a)) <
                                             std::abs(screen_coef(b));
                                    });
    support.erase(weakest);
  }
  return support;
}

BaseRunResult make_run_result(Vector stats, int s_hat, double q,
                              RngStream tie_rng) {
  const int p = static_cast<int>(stats.size());
  BaseRunResult r;
  r.stats = std::move(stats);
  r.s_hat = s_hat;
  std::vector<int> ranks = rank_descending(r.stats, tie_rng);
  std::vector<int> sel;
  for (int i = 0; i < p; ++i)
    if (ranks[i] <= s_hat) sel.push_back(i);
  r.selected = SelectionSet(std::move(sel), p);
  r.run_evalues = Vector::Zero(p);
  double val = p / (q * std::max(s_hat, 1));
  for (int i : r.selected.indices) r.run_evalues(i) = val;
  return r;
}

}  // namespace

std::vector<int> rank_descending(const Vector& stats, RngStream& tie_rng) {
  const int p = static_cast<int>(stats.size());
  std::vector<double> noise(p);
  for (int i = 0; i < p; ++i) noise[i] = tie_rng.uniform();
  std::vector<int> order(p);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (stats(a) != stats(b)) return stats(a) > stats(b);
    return noise[a] > noise[b];
  });
  std::vector<int> ranks(p);
  for (int r = 0; r < p; ++r) ranks[order[r]] = r + 1;
  return ranks;
}

SelectionSet bh_select(const Vector& pvals, double q) {
  const int p = static_cast<int>(pvals.size());
  std::vector<double> sorted(pvals.data(), pvals.data() + p);
  std::sort(sorted.begin(), sorted.end());
  int k_hat = 0;
  for (int k = 1; k <= p; ++k) {
    if (sorted[k - 1] <= q * k / p) k_hat = k;
  }
  std::vector<int> sel;
  if (k_hat > 0) {
    double cutoff = q * k_hat / p;
    for (int i = 0; i < p; ++i)
      if (pvals(i) <= cutoff) sel.push_back(i);
  }
  return SelectionSet(std::move(sel), p);
}

SelectionSet by_select(const Vector& pvals, double q) {
  const int p = static_cast<int>(pvals.size());
  double harmonic = 0.0;
  for (int k = 1; k <= p; ++k) harmonic += 1.0 / k;
  return bh_select(pvals, q / harmonic);
}

SelectionSet ebh_select(const Vector& evals, double q) {
  const int p = static_cast<int>(evals.size());
  std::vector<double> sorted(evals.data(), evals.data() + p);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  int k_hat = 0;
  for (int k = 1; k <= p; ++k) {
    if (sorted[k - 1] >= p / (q * k)) k_hat = k;
  }
  std::vector<int> sel;
  if (k_hat > 0) {
    double cutoff = p / (q * k_hat);
    for (int i = 0; i < p; ++i)
      if (evals(i) >= cutoff) sel.push_back(i);
  }
  return SelectionSet(std::move(sel), p);
}

Matrix gaussian_knockoffs(const Matrix& X, const Matrix& sigma,
                          RngStream& rng) {
  const int n = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());

  Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma);
  double lambda_min = eig.eigenvalues().minCoeff();
  if (lambda_min <= 0.0)
    throw NotPositiveDefinite("gaussian_knockoffs: sigma not PD");
  // Back off the PSD boundary: at s = 2 lambda_min the conditional
  // covariance is singular and the knockoffs become deterministic functions
  // of X (zero power under strongly equicorrelated designs).
  double s = std::min(1.0, 0.9 * 2.0 * lambda_min);

  Eigen::LLT<Matrix> sigma_llt(sigma);
  Matrix sigma_inv = sigma_llt.solve(Matrix::Identity(p, p));

  Matrix cond_chol;
  for (int attempt = 0;; ++attempt) {
    Matrix cond_cov =
        2.0 * s * Matrix::Identity(p, p) - (s * s) * sigma_inv;
    try {
      cond_chol = cholesky(cond_cov);
      break;
    } catch (const NotPositiveDefinite&) {
      if (attempt >= 10) throw;
      s -= 1e-6;
      if (s <= 0.0)
        throw NotPositiveDefinite("gaussian_knockoffs: s shrunk to zero");
    }
  }

  Matrix cond_mean = X - s * (X * sigma_inv);
  Matrix z(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) z(i, j) = rng.normal();
  return cond_mean + z * cond_chol.transpose();
}

Vector knockoff_stats(const Matrix& X, const Matrix& X_knock, const Vector& y,
                      RngStream& rng) {
  const int p = static_cast<int>(X.cols());
  Matrix augmented(X.rows(), 2 * p);
  augmented.leftCols(p) = X;
  augmented.rightCols(p) = X_knock;
  LassoFit fit = lasso_cv(augmented, y, 5, 50, rng);
  Vector W(p);
  for (int j = 0; j < p; ++j)
    W(j) = std::abs(fit.coefficients(j)) - std::abs(fit.coefficients(j + p));
  return W;
}

double knockoff_threshold(const Vector& W, double q, int offset) {
  const int p = static_cast<int>(W.size());
  std::vector<double> candidates;
  for (int i = 0; i < p; ++i)
    if (W(i) != 0.0) candidates.push_back(std::abs(W(i)));
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());
  for (double t : candidates) {
    int neg = 0, pos = 0;
    for (int i = 0; i < p; ++i) {
      if (W(i) <= -t) ++neg;
      if (W(i) >= t) ++pos;
    }
    if ((offset + neg) <= q * std::max(pos, 1)) return t;
  }
  return kInf;
}

Vector rb_evalues(const Vector& W, double q_kn) {
  const int p = static_cast<int>(W.size());
  double tau = knockoff_threshold(W, q_kn, 1);
  Vector e = Vector::Zero(p);
  if (std::isinf(tau)) return e;
  int neg = 0;
  for (int i = 0; i < p; ++i)
    if (W(i) <= -tau) ++neg;
  for (int i = 0; i < p; ++i)
    if (W(i) >= tau) e(i) = static_cast<double>(p) / (1 + neg);
  return e;
}

BaseRunResult knockoff_run(const Matrix& X, const Vector& y,
                           const Matrix& sigma, double q, RngStream& rng,
                           double q_kn) {
  if (q_kn <= 0.0) q_kn = q / 2.0;
  RngStream knock_rng = rng.substream(0);
  RngStream fit_rng = rng.substream(1);
  RngStream tie_rng = rng.substream(2);

  Matrix X_knock = gaussian_knockoffs(X, sigma, knock_rng);
  Vector W = knockoff_stats(X, X_knock, y, fit_rng);

  double tau = knockoff_threshold(W, q, 1);
  int s_hat = 0;
  if (!std::isinf(tau)) {
    for (int i = 0; i < static_cast<int>(W.size()); ++i)
      if (W(i) >= tau) ++s_hat;
  }
  BaseRunResult r = make_run_result(W, s_hat, q, tie_rng);
  r.rb_evalues = rb_evalues(W, q_kn);
  return r;
}

BaseRunResult ds_run(const Matrix& X, const Vector& y, double q,
                     RngStream& rng) {
  const int n = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());
  if (n < 4) throw std::invalid_argument("ds_run: n < 4");

  RngStream split_rng = rng.substream(0);
  RngStream fit_rng = rng.substream(1);
  RngStream tie_rng = rng.substream(2);

  std::vector<int> half1, half2;
  split_indices(n, split_rng, half1, half2);
  Matrix X1 = subset_rows(X, half1), X2 = subset_rows(X, half2);
  Vector y1 = subset(y, half1), y2 = subset(y, half2);

  LassoFit fit1 = lasso_cv(X1, y1, 5, 50, fit_rng);
  std::vector<int> support;
  for (int j = 0; j < p; ++j)
    if (fit1.coefficients(j) != 0.0) support.push_back(j);
  int max_size = static_cast<int>(half2.size()) - 2;
  support = trim_support(std::move(support), fit1.coefficients, X2, max_size);

  Vector beta2 = Vector::Zero(p);
  if (!support.empty()) {
    Vector coef = ols_coef(subset_cols(X2, support), y2);
    for (std::size_t j = 0; j < support.size(); ++j)
      beta2(support[j]) = coef(j);
  }

  Vector T(p);
  for (int j = 0; j < p; ++j) T(j) = fit1.coefficients(j) * beta2(j);

  double tau = knockoff_threshold(T, q, 0);
  int s_hat = 0;
  if (!std::isinf(tau)) {
    for (int j = 0; j < p; ++j)
      if (T(j) >= tau) ++s_hat;
  }
  return make_run_result(std::move(T), s_hat, q, tie_rng);
}

BaseRunResult splitbh_run(const Matrix& X, const Vector& y, double q,
                          RngStream& rng) {
  const int n = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());
  if (n < 4) throw std::invalid_argument("splitbh_run: n < 4");

  RngStream split_rng = rng.substream(0);
  RngStream fit_rng = rng.substream(1);
  RngStream tie_rng = rng.substream(2);

  std::vector<int> half1, half2;
  split_indices(n, split_rng, half1, half2);
  Matrix X1 = subset_rows(X, half1), X2 = subset_rows(X, half2);
  Vector y1 = subset(y, half1), y2 = subset(y, half2);

  LassoFit fit1 = lasso_cv(X1, y1, 5, 50, fit_rng);
  std::vector<int> active;
  for (int j = 0; j < p; ++j)
    if (fit1.coefficients(j) != 0.0) active.push_back(j);
  int max_size = static_cast<int>(half2.size()) - 2;
  active = trim_support(std::move(active), fit1.coefficients, X2, max_size);

  Vector pvec = Vector::Ones(p);
  if (!active.empty()) {
    Vector pv = ols_pvalues(subset_cols(X2, active), y2);
    for (std::size_t j = 0; j < active.size(); ++j) pvec(active[j]) = pv(j);
  }

  int s_hat = static_cast<int>(bh_select(pvec, q).size());
  return make_run_result(-pvec, s_hat, q, tie_rng);
}

}  // namespace fdrstab
