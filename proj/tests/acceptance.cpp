// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Statistical checks use fixed seeds so the verdict is reproducible.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "fdrstab/experiment.hpp"
#include "fdrstab/lasso.hpp"
#include "fdrstab/stats.hpp"
#include "oracles.hpp"

using namespace fdrstab;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int criterion, const char* name, bool pass, Clock::time_point t0,
            const std::string& detail) {
  double secs =
      std::chrono::duration<double>(Clock::now() - t0).count();
  std::printf("[%2d] %-28s %s (%s, %.1fs)\n", criterion, name,
              pass ? "PASS" : "FAIL", detail.c_str(), secs);
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
  char buf[256];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

Vector vec_from(const std::vector<double>& v) {
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out(i) = v[i];
  return out;
}

// Synthetic run with selected = top-s_hat of stats (no ties in stats).
BaseRunResult synth_run(Vector stats, int s_hat, double q) {
  const int p = static_cast<int>(stats.size());
  std::vector<int> order(p);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return stats(a) > stats(b); });
  BaseRunResult r;
  r.stats = std::move(stats);
  r.s_hat = s_hat;
  r.selected = SelectionSet(
      std::vector<int>(order.begin(), order.begin() + s_hat), p);
  r.run_evalues = Vector::Zero(p);
  for (int i : r.selected.indices)
    r.run_evalues(i) = p / (q * std::max(s_hat, 1));
  return r;
}

// ---------------------------------------------------------------------------

void criterion1_lemma1() {
  auto t0 = Clock::now();
  const std::vector<AggregationKind> kinds = {
      AggregationKind::Mean, AggregationKind::Median,
      AggregationKind::RankMean, AggregationKind::SelProb,
      AggregationKind::EAvg};
  RngStream rng(10001, 0);
  int ok = 0;
  const int trials = 1000;
  for (int trial = 0; trial < trials; ++trial) {
    int p = 1 + static_cast<int>(rng.uniform_below(200));
    int M = 1 + static_cast<int>(rng.uniform_below(20));
    double q = 0.02 + 0.6 * rng.uniform();
    Ensemble e;
    e.p = p;
    e.q = q;
    e.master_seed = 10000 + trial;
    double s_sum = 0.0;
    for (int m = 0; m < M; ++m) {
      Vector stats(p);
      for (int i = 0; i < p; ++i) stats(i) = rng.normal();
      int s_hat = static_cast<int>(rng.uniform_below(p + 1));
      s_sum += s_hat;
      e.runs.push_back(synth_run(std::move(stats), s_hat, q));
    }
    e.s_bar = static_cast<int>(std::ceil(s_sum / M));
    try {
      // stabilizer_select internally compares e-BH with the top-s_bar set
      // and throws LemmaViolation on any mismatch.
      stabilizer_select(e, kinds[trial % kinds.size()]);
      ++ok;
    } catch (const LemmaViolation&) {
    }
  }
  report(1, "e-BH/rank-set equivalence", ok == trials,
         t0, fmt("%d/%d ensembles", ok, trials));
}

void criterion2_ebh_oracle() {
  auto t0 = Clock::now();
  RngStream rng(10002, 0);
  int ok = 0;
  const int trials = 1000;
  for (int trial = 0; trial < trials; ++trial) {
    int p = 1 + static_cast<int>(rng.uniform_below(8));
    double q = 0.05 + 0.6 * rng.uniform();
    Vector e(p);
    for (int i = 0; i < p; ++i) {
      double u = rng.uniform();
      if (u < 0.3) e(i) = 0.0;
      else if (u < 0.6) e(i) = 3.0 * rng.uniform();
      else e(i) = p / (q * (1.0 + rng.uniform_below(p)));  // near thresholds
    }
    if (ebh_select(e, q) == oracles::ebh_bruteforce(e, q)) ++ok;
  }
  report(2, "e-BH brute-force equality", ok == trials, t0,
         fmt("%d/%d vectors", ok, trials));
}

void criterion3_ebh_fdr() {
  auto t0 = Clock::now();
  const int p = 100, nulls = 80, reps = 10000;
  const double mu = 2.0, q = 0.1;
  RngStream rng(10003, 0);
  double sum_fdp = 0.0, sum_fdp2 = 0.0;
  for (int rep = 0; rep < reps; ++rep) {
    Vector e(p);
    for (int i = 0; i < p; ++i) {
      double z = rng.normal() + (i < nulls ? 0.0 : mu);
      e(i) = std::exp(mu * z - mu * mu / 2.0);
    }
    SelectionSet sel = ebh_select(e, q);
    int v = 0;
    for (int i : sel.indices)
      if (i < nulls) ++v;
    double fdp = sel.size() > 0 ? static_cast<double>(v) / sel.size() : 0.0;
    sum_fdp += fdp;
    sum_fdp2 += fdp * fdp;
  }
  double fdr = sum_fdp / reps;
  double var = (sum_fdp2 - reps * fdr * fdr) / (reps - 1);
  double se = std::sqrt(var / reps);
  bool pass = fdr <= q + 2.0 * se;
  report(3, "e-BH FDR control", pass, t0,
         fmt("FDR=%.4f vs %.4f", fdr, q + 2.0 * se));
}

// Shared all-null design for criteria 4 and 5.
struct NullDesign {
  Matrix X;
  Vector y;
};

NullDesign null_design(const Matrix& chol, int n, int p, std::uint64_t seed) {
  RngStream rng(seed, 0);
  NullDesign d;
  d.X = sample_mvn(Vector::Zero(p), chol, n, rng);
  d.y = Vector(n);
  RngStream yrng(seed, 1);
  for (int i = 0; i < n; ++i) d.y(i) = yrng.normal();
  return d;
}

void criterion4_knockoff_null() {
  auto t0 = Clock::now();
  const int n = 300, p = 100, reps = 100;
  const double q = 0.1;
  Matrix sigma = materialize_covariance(CovarianceSpec::compound_symmetry(0.3), p);
  Matrix chol = cholesky(sigma);
  long pos = 0, neg = 0;
  double sum_fdp = 0.0;
  for (int rep = 0; rep < reps; ++rep) {
    NullDesign d = null_design(chol, n, p, 40000 + rep);
    RngStream rng(41000, rep);
    BaseRunResult run = knockoff_run(d.X, d.y, sigma, q, rng);
    for (int j = 0; j < p; ++j) {
      if (run.stats(j) > 0) ++pos;
      if (run.stats(j) < 0) ++neg;
    }
    sum_fdp += run.selected.size() > 0 ? 1.0 : 0.0;  // every selection false
  }
  double frac = static_cast<double>(pos) / std::max<long>(pos + neg, 1);
  double fdr = sum_fdp / reps;
  bool pass = frac >= 0.45 && frac <= 0.55 && fdr <= 0.12;
  report(4, "knockoff null symmetry", pass, t0,
         fmt("sign frac=%.3f, FDR=%.3f", frac, fdr));
}

void criterion5_mirror_null() {
  auto t0 = Clock::now();
  const int n = 300, p = 100, reps = 100;
  Matrix sigma = materialize_covariance(CovarianceSpec::compound_symmetry(0.3), p);
  Matrix chol = cholesky(sigma);
  long pos = 0, neg = 0;
  for (int rep = 0; rep < reps; ++rep) {
    NullDesign d = null_design(chol, n, p, 50000 + rep);
    RngStream rng(51000, rep);
    BaseRunResult run = ds_run(d.X, d.y, 0.1, rng);
    for (int j = 0; j < p; ++j) {
      if (run.stats(j) > 0) ++pos;
      if (run.stats(j) < 0) ++neg;
    }
  }
  double frac = static_cast<double>(pos) / std::max<long>(pos + neg, 1);
  bool pass = frac >= 0.45 && frac <= 0.55;
  report(5, "mirror null symmetry", pass, t0, fmt("sign frac=%.3f", frac));
}

const StabilitySummary& summary_for(const SimulateOutput& out,
                                    const std::string& method) {
  for (const auto& s : out.summaries)
    if (s.method == method) return s.summary;
  throw std::logic_error("missing method summary: " + method);
}

void criterion6_toy_trend() {
  auto t0 = Clock::now();
  ExperimentRequest req;
  req.scenario = toy_scenario();
  req.scenario.reps = 200;
  req.scenario.master_seed = 2026;
  req.methods = {
      MethodSpec::parse("knockoff+stab:e_avg"), MethodSpec::parse("knockoff+none"),
      MethodSpec::parse("knockoff+derand"),     MethodSpec::parse("ds+stab:e_avg"),
      MethodSpec::parse("ds+none"),             MethodSpec::parse("ds+mds")};
  SimulateOutput out = run_simulate(req);

  const auto& stab_kn = summary_for(out, "knockoff+stab:e_avg");
  const auto& kn = summary_for(out, "knockoff+none");
  const auto& derand = summary_for(out, "knockoff+derand");
  const auto& stab_ds = summary_for(out, "ds+stab:e_avg");
  const auto& ds = summary_for(out, "ds+none");
  const auto& mds = summary_for(out, "ds+mds");

  bool a = stab_kn.mean_fdp <= 0.13 && stab_ds.mean_fdp <= 0.13;
  bool b = stab_kn.var_n_selected < kn.var_n_selected &&
           stab_ds.var_n_selected < ds.var_n_selected;
  bool c = stab_kn.mean_power >= derand.mean_power;
  bool d = stab_ds.mean_power >= 0.95 * mds.mean_power;
  report(6, "toy example trend", a && b && c && d, t0,
         fmt("FDR %.3f/%.3f; var |S| %.1f<%.1f, %.1f<%.1f; "
             "power %.3f>=%.3f, %.3f>=0.95*%.3f",
             stab_kn.mean_fdp, stab_ds.mean_fdp, stab_kn.var_n_selected,
             kn.var_n_selected, stab_ds.var_n_selected, ds.var_n_selected,
             stab_kn.mean_power, derand.mean_power, stab_ds.mean_power,
             mds.mean_power));
}

void criterion7_stability_convergence() {
  auto t0 = Clock::now();
  ExperimentRequest req;
  req.scenario.name = "stability";
  req.scenario.n = 500;
  req.scenario.p = 500;
  req.scenario.s = 50;
  req.scenario.signal = SignalLaw::gaussian_scaled(7.0);
  req.scenario.covariance = CovarianceSpec::compound_symmetry(0.4);
  req.scenario.q = 0.1;
  req.scenario.master_seed = 2027;
  req.methods = {MethodSpec::parse("ds+stab:e_avg")};
  req.m_sweep = {5, 10, 20, 40, 80};
  req.ensembles_per_m = 50;
  std::vector<StabilityRow> rows = run_stability(req);

  bool nondecreasing = true;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].summary.mean_pairwise_jaccard <
        rows[i - 1].summary.mean_pairwise_jaccard - 0.02)
      nondecreasing = false;
  }
  double j80 = rows.back().summary.mean_pairwise_jaccard;
  double var5 = rows.front().summary.var_n_selected;
  double var80 = rows.back().summary.var_n_selected;
  bool pass = nondecreasing && j80 >= 0.90 && var80 <= 0.25 * var5;
  std::string js;
  for (const auto& r : rows) js += fmt(" %.3f", r.summary.mean_pairwise_jaccard);
  report(7, "stability convergence", pass, t0,
         fmt("Jaccard%s; var|S| %.2f -> %.2f", js.c_str(), var5, var80));
}

void criterion8_scaled_grid() {
  auto t0 = Clock::now();
  bool pass = true;
  std::string detail;
  for (double rho : {0.2, 0.5, 0.8}) {
    ExperimentRequest req;
    req.scenario.name = fmt("grid_rho%.1f", rho);
    req.scenario.n = 300;
    req.scenario.p = 300;
    req.scenario.s = 20;
    req.scenario.signal = SignalLaw::gaussian_scaled(5.0);
    req.scenario.covariance = CovarianceSpec::block_toeplitz(rho, 50);
    req.scenario.q = 0.1;
    req.scenario.M = 20;
    req.scenario.reps = 200;
    req.scenario.master_seed = 2028;
    req.methods = {
        MethodSpec::parse("splitbh+stab:e_avg"), MethodSpec::parse("splitbh+none"),
        MethodSpec::parse("knockoff+stab:e_avg"), MethodSpec::parse("knockoff+none"),
        MethodSpec::parse("ds+stab:e_avg"),       MethodSpec::parse("ds+none")};
    SimulateOutput out = run_simulate(req);
    for (const char* base : {"splitbh", "knockoff", "ds"}) {
      const auto& stab =
          summary_for(out, std::string(base) + "+stab:e_avg");
      const auto& single = summary_for(out, std::string(base) + "+none");
      if (stab.mean_fdp > 0.13) pass = false;
      if (stab.mean_power < single.mean_power - 0.05) pass = false;
      detail += fmt(" %s@%.1f(F%.3f,P%.2f/%.2f)", base, rho, stab.mean_fdp,
                    stab.mean_power, single.mean_power);
    }
  }
  report(8, "scaled grid FDR/power", pass, t0, detail);
}

void criterion9_numerics_oracles() {
  auto t0 = Clock::now();
  bool pass = true;
  std::string detail;

  // (a) orthogonal design: lasso equals componentwise soft-thresholding.
  {
    Matrix X(4, 2);  // +-1 columns, X^T X / n = I
    X << 1, 1, 1, -1, -1, 1, -1, -1;
    Vector beta_true(2);
    beta_true << 3.0, 0.5;
    Vector y = X * beta_true;
    LassoFit fit = lasso_fit(X, y, 1.0);
    Vector oracle = oracles::soft_threshold_solution(X, y, 1.0);
    double err = (fit.coefficients - oracle).cwiseAbs().maxCoeff();
    if (err > 1e-6) pass = false;
    detail += fmt("soft-thr %.1e", err);
  }

  // (b) lambda = 0 equals OLS.
  {
    RngStream rng(10009, 0);
    int n = 60, p = 8;
    Matrix X(n, p);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < p; ++j) X(i, j) = rng.normal();
    Vector y(n);
    for (int i = 0; i < n; ++i) y(i) = rng.normal() + X(i, 0);
    LassoFit fit = lasso_fit(X, y, 0.0);
    Vector ols = oracles::ols_solution(X, y);
    double err = (fit.coefficients - ols).cwiseAbs().maxCoeff();
    if (err > 1e-6) pass = false;
    detail += fmt(", ols %.1e", err);
  }

  // (c) student_t_sf vs quadrature.
  {
    double worst = 0.0;
    for (double df : {1.0, 2.0, 5.0, 30.0, 200.0})
      for (double t : {0.0, 0.5, 1.0, 2.0, 5.0, 10.0})
        worst = std::max(worst,
                         std::abs(student_t_sf(t, df) -
                                  oracles::t_sf_quadrature(t, df)));
    if (worst > 1e-8) pass = false;
    detail += fmt(", t-sf %.1e", worst);
  }

  // (d) Cholesky reconstruction.
  {
    double worst = 0.0;
    for (const auto& spec :
         {CovarianceSpec::identity(), CovarianceSpec::compound_symmetry(0.5),
          CovarianceSpec::block_toeplitz(0.7, 50)}) {
      Matrix sigma = materialize_covariance(spec, 200);
      Matrix L = cholesky(sigma);
      worst = std::max(
          worst, (L * L.transpose() - sigma).cwiseAbs().maxCoeff());
    }
    if (worst > 1e-10) pass = false;
    detail += fmt(", chol %.1e", worst);
  }

  report(9, "numerics oracles", pass, t0, detail);
}

void criterion10_determinism() {
  auto t0 = Clock::now();
  fs::path root = fs::temp_directory_path() / "fdrstab_acceptance";
  fs::remove_all(root);
  std::vector<std::string> contents;
  for (int threads : {1, 4, 8}) {
    ExperimentRequest req;
    req.scenario.name = "det";
    req.scenario.n = 150;
    req.scenario.p = 40;
    req.scenario.s = 5;
    req.scenario.signal = SignalLaw::uniform_two_sided(0.5, 1.5);
    req.scenario.covariance = CovarianceSpec::compound_symmetry(0.3);
    req.scenario.q = 0.1;
    req.scenario.M = 6;
    req.scenario.reps = 10;
    req.scenario.master_seed = 2030;
    req.methods = {
        MethodSpec::parse("splitbh+stab:mean"), MethodSpec::parse("splitbh+mbh"),
        MethodSpec::parse("knockoff+stab:e_avg"),
        MethodSpec::parse("knockoff+derand"), MethodSpec::parse("ds+mds"),
        MethodSpec::parse("ds+none")};
    req.threads = threads;
    req.output_dir = (root / ("t" + std::to_string(threads))).string();
    run_simulate(req);
    std::ifstream in(fs::path(req.output_dir) / "results.csv",
                     std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    contents.push_back(ss.str());
  }
  bool pass = !contents[0].empty() && contents[0] == contents[1] &&
              contents[1] == contents[2];
  report(10, "determinism across threads", pass, t0,
         fmt("%zu bytes x 3", contents[0].size()));
}

}  // namespace

int main() {
  criterion1_lemma1();
  criterion2_ebh_oracle();
  criterion3_ebh_fdr();
  criterion9_numerics_oracles();
  criterion10_determinism();
  criterion4_knockoff_null();
  criterion5_mirror_null();
  criterion8_scaled_grid();
  criterion7_stability_convergence();
  criterion6_toy_trend();
  if (g_failures > 0) {
    std::printf("%d criterion(s) FAILED\n", g_failures);
    return 1;
  }
  std::printf("all 10 criteria passed\n");
  return 0;
}
