#include "fdrstab/stabilizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fdrstab/stats.hpp"

namespace fdrstab {

namespace {

// Stream id reserved for aggregation tie-breaking, away from the per-run ids.
constexpr std::uint64_t kAggTieStream = 0x61676754696530ULL;  // "aggTie0"

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

const char* aggregation_name(AggregationKind kind) {
  switch (kind) {
    case AggregationKind::Mean: return "mean";
    case AggregationKind::Median: return "median";
    case AggregationKind::RankMean: return "rank_mean";
    case AggregationKind::SelProb: return "sel_prob";
    case AggregationKind::EAvg: return "e_avg";
  }
  return "?";
}

Ensemble run_ensemble(const BaseProcedure& base, const Matrix& X,
                      const Vector& y, double q, int M,
                      std::uint64_t master_seed) {
  if (M < 1) throw std::invalid_argument("run_ensemble: M < 1");
  Ensemble e;
  e.p = static_cast<int>(X.cols());
  e.q = q;
  e.master_seed = master_seed;
  e.runs.reserve(M);
  double s_sum = 0.0;
  for (int m = 0; m < M; ++m) {
    RngStream rng(master_seed, static_cast<std::uint64_t>(m));
    e.runs.push_back(base(X, y, q, rng));
    s_sum += e.runs.back().s_hat;
  }
  e.s_bar = static_cast<int>(std::ceil(s_sum / M));
  return e;
}

AggregatedScores aggregate(const Ensemble& ensemble, AggregationKind kind) {
  const int p = ensemble.p;
  const int M = static_cast<int>(ensemble.runs.size());
  if (M == 0) throw std::invalid_argument("aggregate: empty ensemble");

  AggregatedScores out;
  out.values = Vector::Zero(p);
  out.tie_seed = ensemble.master_seed ^ kAggTieStream ^
                 static_cast<std::uint64_t>(kind);
  RngStream tie_root(out.tie_seed, kAggTieStream);

  switch (kind) {
    case AggregationKind::Mean:
      for (const auto& run : ensemble.runs) out.values += run.stats;
      out.values /= M;
      break;
    case AggregationKind::Median:
      for (int i = 0; i < p; ++i) {
        std::vector<double> ti(M);
        for (int m = 0; m < M; ++m) ti[m] = ensemble.runs[m].stats(i);
        out.values(i) = median_of(std::move(ti));
      }
      break;
    case AggregationKind::RankMean: {
      // Lower mean rank is better; negate so larger score means better.
      for (int m = 0; m < M; ++m) {
        RngStream run_tie = tie_root.substream(m);
        std::vector<int> ranks =
            rank_descending(ensemble.runs[m].stats, run_tie);
        for (int i = 0; i < p; ++i) out.values(i) -= ranks[i];
      }
      out.values /= M;
      break;
    }
    case AggregationKind::SelProb:
      for (const auto& run : ensemble.runs)
        for (int i : run.selected.indices) out.values(i) += 1.0;
      out.values /= M;
      break;
    case AggregationKind::EAvg:
      for (const auto& run : ensemble.runs) out.values += run.run_evalues;
      out.values /= M;
      break;
  }

  RngStream final_tie = tie_root.substream(0xffff);
  out.ranks = rank_descending(out.values, final_tie);
  return out;
}

Vector stab_evalues(const AggregatedScores& scores, int s_bar, double q,
                    int p) {
  Vector e = Vector::Zero(p);
  if (s_bar <= 0) return e;
  double val = p / (q * std::max(s_bar, 1));
  for (int i = 0; i < p; ++i)
    if (scores.ranks[i] <= s_bar) e(i) = val;
  return e;
}

SelectionSet stabilizer_select(const Ensemble& ensemble,
                               AggregationKind kind) {
  AggregatedScores scores = aggregate(ensemble, kind);
  Vector e = stab_evalues(scores, ensemble.s_bar, ensemble.q, ensemble.p);
  SelectionSet via_ebh = ebh_select(e, ensemble.q);

  std::vector<int> top;
  for (int i = 0; i < ensemble.p; ++i)
    if (scores.ranks[i] <= ensemble.s_bar) top.push_back(i);
  SelectionSet via_ranks(std::move(top), ensemble.p);

  if (!(via_ebh == via_ranks)) {
    throw LemmaViolation(
        "stabilizer_select: e-BH set differs from the top-s_bar rank set");
  }
  return via_ebh;
}

SelectionSet derand_select(const std::vector<Vector>& rb_evalue_runs,
                           double q) {
  if (rb_evalue_runs.empty())
    throw std::invalid_argument("derand_select: no runs");
  Vector mean = Vector::Zero(rb_evalue_runs.front().size());
  for (const auto& e : rb_evalue_runs) mean += e;
  mean /= static_cast<double>(rb_evalue_runs.size());
  return ebh_select(mean, q);
}

SelectionSet mds_select(const Ensemble& ensemble, double q) {
  const int p = ensemble.p;
  const int M = static_cast<int>(ensemble.runs.size());
  Vector incl = Vector::Zero(p);
  for (const auto& run : ensemble.runs) {
    double denom = std::max(run.s_hat, 1);
    for (int i : run.selected.indices) incl(i) += 1.0 / denom;
  }
  incl /= M;

  std::vector<int> order(p);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (incl(a) != incl(b)) return incl(a) < incl(b);
    return a < b;
  });

  double mass = 0.0;
  std::size_t cut = 0;
  while (cut < order.size() && mass + incl(order[cut]) <= q) {
    mass += incl(order[cut]);
    ++cut;
  }
  std::vector<int> sel(order.begin() + cut, order.end());
  return SelectionSet(std::move(sel), p);
}

SelectionSet mbh_select(const Matrix& pvalue_matrix, double q, double gamma) {
  const int M = static_cast<int>(pvalue_matrix.rows());
  const int p = static_cast<int>(pvalue_matrix.cols());
  if (M < 1) throw std::invalid_argument("mbh_select: no runs");
  Vector adjusted(p);
  for (int i = 0; i < p; ++i) {
    std::vector<double> scaled(M);
    for (int m = 0; m < M; ++m) scaled[m] = pvalue_matrix(m, i) / gamma;
    adjusted(i) = std::min(1.0, quantile(scaled, gamma));
  }
  return bh_select(adjusted, q);
}

}  // namespace fdrstab
