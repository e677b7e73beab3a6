#include "fdrstab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fdrstab {

namespace {

// Continued fraction for the incomplete beta (Lentz's method).
double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;

  double qab = a + b;
  double qap = a + 1.0;
  double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                    a * std::log(x) + b * std::log1p(-x);
  double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_cf(a, b, x) / a;
  }
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_sf(double t, double df) {
  if (std::isinf(t)) return t > 0 ? 0.0 : 1.0;
  double x = df / (df + t * t);
  double tail = 0.5 * incomplete_beta(df / 2.0, 0.5, x);
  return t >= 0.0 ? tail : 1.0 - tail;
}

double quantile(const std::vector<double>& values, double gamma) {
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  double h = (static_cast<double>(n) - 1.0) * gamma;
  std::size_t lo = static_cast<std::size_t>(std::floor(h));
  if (lo >= n - 1) return sorted.back();
  double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

Vector ols_pvalues(const Matrix& X, const Vector& y) {
  const int n = static_cast<int>(X.rows());
  const int k = static_cast<int>(X.cols());
  if (k == 0) return Vector(0);

  Matrix design(n, k + 1);
  design.col(0).setOnes();
  design.rightCols(k) = X;

  Matrix xtx = design.transpose() * design;
  Eigen::FullPivLU<Matrix> lu(xtx);
  if (!lu.isInvertible()) {
    throw SingularDesign("ols_pvalues: X^T X is singular");
  }
  Matrix xtx_inv = lu.inverse();
  Vector beta = xtx_inv * (design.transpose() * y);
  Vector resid = y - design * beta;

  int df = n - k - 1;
  if (df <= 0) throw SingularDesign("ols_pvalues: nonpositive residual df");
  double sigma2 = resid.squaredNorm() / df;

  Vector pvals(k);
  for (int j = 0; j < k; ++j) {
    double se = std::sqrt(sigma2 * xtx_inv(j + 1, j + 1));
    if (se <= 0.0 || !std::isfinite(se)) {
      pvals(j) = 0.0;
      continue;
    }
    double t = beta(j + 1) / se;
    pvals(j) = 2.0 * student_t_sf(std::abs(t), df);
    pvals(j) = std::min(1.0, std::max(0.0, pvals(j)));
  }
  return pvals;
}

}  // namespace fdrstab
