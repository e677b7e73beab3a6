#pragma once

#include <functional>

#include "fdrstab/procedures.hpp"

namespace fdrstab {

// M independent runs of one base procedure on one dataset.
// s_bar = ceil(mean of s_hat over the runs).
struct Ensemble {
  std::vector<BaseRunResult> runs;
  int p = 0;
  double q = 0.0;
  int s_bar = 0;
  std::uint64_t master_seed = 0;  // seeds the aggregation tie-breaking too
};

enum class AggregationKind { Mean, Median, RankMean, SelProb, EAvg };

// Aggregated per-feature scores g_i, oriented so larger means more evidence,
// and the consensus ranking (rank 1 = best). Ties broken with noise from the
// recorded tie seed.
struct AggregatedScores {
  Vector values;
  std::vector<int> ranks;
  std::uint64_t tie_seed = 0;
};

using BaseProcedure =
    std::function<BaseRunResult(const Matrix&, const Vector&, double, RngStream&)>;

// Runs the base procedure M times; run m draws from RngStream(master_seed, m).
Ensemble run_ensemble(const BaseProcedure& base, const Matrix& X,
                      const Vector& y, double q, int M,
                      std::uint64_t master_seed);

AggregatedScores aggregate(const Ensemble& ensemble, AggregationKind kind);

// Stabilized relaxed e-values: p / (q (s_bar v 1)) on the top-s_bar ranked
// features, 0 elsewhere.
Vector stab_evalues(const AggregatedScores& scores, int s_bar, double q, int p);

// e-BH on the stabilized e-values; cross-checked against the top-s_bar rank
// set, which it must equal exactly.
SelectionSet stabilizer_select(const Ensemble& ensemble, AggregationKind kind);

// Derandomized-knockoff competitor: e-BH on the mean of per-run rb e-values.
SelectionSet derand_select(const std::vector<Vector>& rb_evalue_runs, double q);

// MDS competitor: inclusion rates, then the largest ascending prefix with
// rate mass <= q is discarded and the complement selected.
SelectionSet mds_select(const Ensemble& ensemble, double q);

// MBH competitor: BH on quantile-aggregated p-values
// Q_i = min(1, quantile({P_i^(m) / gamma}, gamma)).
SelectionSet mbh_select(const Matrix& pvalue_matrix, double q,
                        double gamma = 0.5);

const char* aggregation_name(AggregationKind kind);

}  // namespace fdrstab
