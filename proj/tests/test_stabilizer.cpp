#include <doctest.h>

#include <cmath>
#include <numeric>

#include "fdrstab/stabilizer.hpp"

using namespace fdrstab;

namespace {

Vector vec(std::initializer_list<double> values) {
  Vector v(values.size());
  int i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

// Synthetic run with selected = top-s_hat of stats (assumes no ties).
BaseRunResult make_run(Vector stats, int s_hat, double q) {
  const int p = static_cast<int>(stats.size());
  std::vector<int> order(p);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return stats(a) > stats(b); });
  BaseRunResult r;
  r.stats = std::move(stats);
  r.s_hat = s_hat;
  std::vector<int> sel(order.begin(), order.begin() + s_hat);
  r.selected = SelectionSet(sel, p);
  r.run_evalues = Vector::Zero(p);
  for (int i : r.selected.indices)
    r.run_evalues(i) = p / (q * std::max(s_hat, 1));
  return r;
}

Ensemble make_ensemble(std::vector<BaseRunResult> runs, double q,
                       std::uint64_t seed = 99) {
  Ensemble e;
  e.p = static_cast<int>(runs.front().stats.size());
  e.q = q;
  e.master_seed = seed;
  double sum = 0.0;
  for (const auto& r : runs) sum += r.s_hat;
  e.s_bar = static_cast<int>(std::ceil(sum / runs.size()));
  e.runs = std::move(runs);
  return e;
}

}  // namespace

TEST_CASE("run_ensemble computes s_bar and is deterministic") {
  // Synthetic base: s_hat alternates 2, 1 with the run stream parity.
  BaseProcedure base = [](const Matrix&, const Vector& y, double q,
                          RngStream& rng) {
    int s_hat = (rng.stream_id() % 2 == 0) ? 2 : 1;
    Vector stats(4);
    stats << 4, 3, 2, 1;
    stats(0) += rng.uniform();  // consume randomness
    return make_run(stats, s_hat, q);
  };
  Matrix X(2, 4);
  X.setZero();
  Vector y = Vector::Zero(2);

  Ensemble e = run_ensemble(base, X, y, 0.1, 2, 5);
  CHECK(e.s_bar == 2);  // ceil((2 + 1) / 2)

  Ensemble single = run_ensemble(base, X, y, 0.1, 1, 5);
  CHECK(single.s_bar == single.runs[0].s_hat);

  Ensemble e2 = run_ensemble(base, X, y, 0.1, 2, 5);
  for (int m = 0; m < 2; ++m) {
    CHECK((e.runs[m].stats - e2.runs[m].stats).cwiseAbs().maxCoeff() == 0.0);
    CHECK(e.runs[m].selected == e2.runs[m].selected);
  }
}

TEST_CASE("aggregate: worked examples per kind") {
  auto r1 = make_run(vec({1, 10}), 1, 0.1);
  auto r2 = make_run(vec({3, -10}), 1, 0.1);
  Ensemble e = make_ensemble({r1, r2}, 0.1);

  AggregatedScores mean = aggregate(e, AggregationKind::Mean);
  CHECK(mean.values(0) == doctest::Approx(2.0));

  AggregatedScores med = aggregate(e, AggregationKind::Median);
  CHECK(med.values(0) == doctest::Approx(2.0));
  CHECK(med.values(1) == doctest::Approx(0.0));

  // feature 0 ranks: run1 pi=2 (behind 10), run2 pi=1; s_hat = 1 both
  AggregatedScores sp = aggregate(e, AggregationKind::SelProb);
  CHECK(sp.values(0) == doctest::Approx(0.5));

  AggregatedScores rm = aggregate(e, AggregationKind::RankMean);
  CHECK(rm.values(0) == doctest::Approx(-1.5));  // negated mean rank

  // run e-values: feature 0 gets p/(q*1) = 20 in run 2 only
  AggregatedScores ea = aggregate(e, AggregationKind::EAvg);
  CHECK(ea.values(0) == doctest::Approx(10.0));
}

TEST_CASE("stab_evalues worked example and saturation") {
  AggregatedScores scores;
  scores.values = vec({0.1, 0.2, 5.0, 0.3, 4.0});
  scores.ranks = {5, 4, 1, 3, 2};
  Vector e = stab_evalues(scores, 2, 0.1, 5);
  CHECK(e(0) == 0.0);
  CHECK(e(1) == 0.0);
  CHECK(e(2) == doctest::Approx(25.0));
  CHECK(e(3) == 0.0);
  CHECK(e(4) == doctest::Approx(25.0));

  CHECK(stab_evalues(scores, 0, 0.1, 5).cwiseAbs().maxCoeff() == 0.0);

  Vector sat = stab_evalues(scores, 5, 0.1, 5);
  for (int i = 0; i < 5; ++i) CHECK(sat(i) == doctest::Approx(10.0));
}

TEST_CASE("stabilized e-value structure invariant") {
  RngStream rng(211, 0);
  for (int trial = 0; trial < 100; ++trial) {
    int p = 2 + static_cast<int>(rng.uniform_below(50));
    int M = 1 + static_cast<int>(rng.uniform_below(8));
    double q = 0.05 + 0.3 * rng.uniform();
    std::vector<BaseRunResult> runs;
    for (int m = 0; m < M; ++m) {
      Vector stats(p);
      for (int i = 0; i < p; ++i) stats(i) = rng.normal();
      runs.push_back(make_run(std::move(stats),
                              static_cast<int>(rng.uniform_below(p + 1)), q));
    }
    Ensemble e = make_ensemble(std::move(runs), q, trial);
    AggregatedScores scores = aggregate(e, AggregationKind::Mean);
    Vector es = stab_evalues(scores, e.s_bar, q, p);
    int nonzero = 0;
    for (int i = 0; i < p; ++i)
      if (es(i) != 0.0) ++nonzero;
    CHECK(nonzero == std::min(e.s_bar, p));
    if (e.s_bar >= 1 && e.s_bar <= p)
      CHECK(es.sum() == doctest::Approx(p / q));
  }
}

TEST_CASE("stabilizer_select equals the top-s_bar rank set") {
  // randomized cross-check of the e-BH / rank-cut equivalence
  RngStream rng(223, 0);
  const std::vector<AggregationKind> kinds = {
      AggregationKind::Mean, AggregationKind::Median,
      AggregationKind::RankMean, AggregationKind::SelProb,
      AggregationKind::EAvg};
  for (int trial = 0; trial < 300; ++trial) {
    int p = 1 + static_cast<int>(rng.uniform_below(200));
    int M = 1 + static_cast<int>(rng.uniform_below(20));
    double q = 0.02 + 0.5 * rng.uniform();
    std::vector<BaseRunResult> runs;
    for (int m = 0; m < M; ++m) {
      Vector stats(p);
      for (int i = 0; i < p; ++i) stats(i) = rng.normal();
      runs.push_back(make_run(std::move(stats),
                              static_cast<int>(rng.uniform_below(p + 1)), q));
    }
    Ensemble e = make_ensemble(std::move(runs), q, trial);
    AggregationKind kind = kinds[trial % kinds.size()];
    SelectionSet sel = stabilizer_select(e, kind);  // throws on any mismatch
    CHECK(static_cast<int>(sel.size()) == std::min(e.s_bar, p));
  }
}

TEST_CASE("stabilizer_select boundary sizes") {
  auto r0 = make_run(vec({3, 2, 1}), 0, 0.1);
  Ensemble empty = make_ensemble({r0}, 0.1);
  CHECK(stabilizer_select(empty, AggregationKind::Mean).size() == 0);

  auto rall = make_run(vec({3, 2, 1}), 3, 0.1);
  Ensemble full = make_ensemble({rall}, 0.1);
  CHECK(stabilizer_select(full, AggregationKind::Mean).size() == 3);
}

TEST_CASE("aggregation is permutation equivariant") {
  RngStream rng(227, 0);
  int p = 12, M = 4;
  std::vector<BaseRunResult> runs;
  for (int m = 0; m < M; ++m) {
    Vector stats(p);
    for (int i = 0; i < p; ++i) stats(i) = rng.normal();
    runs.push_back(make_run(std::move(stats), 3, 0.1));
  }
  Ensemble e = make_ensemble(runs, 0.1, 7);

  std::vector<int> perm(p);
  std::iota(perm.begin(), perm.end(), 0);
  RngStream prng(227, 1);
  prng.shuffle(perm);

  std::vector<BaseRunResult> permuted;
  for (const auto& r : runs) {
    Vector stats(p);
    for (int i = 0; i < p; ++i) stats(perm[i]) = r.stats(i);
    permuted.push_back(make_run(std::move(stats), r.s_hat, 0.1));
  }
  Ensemble ep = make_ensemble(std::move(permuted), 0.1, 7);

  for (auto kind : {AggregationKind::Mean, AggregationKind::SelProb,
                    AggregationKind::EAvg}) {
    AggregatedScores a = aggregate(e, kind);
    AggregatedScores b = aggregate(ep, kind);
    for (int i = 0; i < p; ++i)
      CHECK(a.values(i) == doctest::Approx(b.values(perm[i])));
  }
  // with tie-free scores (Mean of normals) the rank cut maps through the
  // permutation too
  SelectionSet sa = stabilizer_select(e, AggregationKind::Mean);
  SelectionSet sb = stabilizer_select(ep, AggregationKind::Mean);
  std::vector<int> mapped;
  for (int i : sa.indices) mapped.push_back(perm[i]);
  std::sort(mapped.begin(), mapped.end());
  CHECK(mapped == sb.indices);
}

TEST_CASE("mean aggregation is monotone in each statistic") {
  RngStream rng(229, 0);
  for (int trial = 0; trial < 100; ++trial) {
    int p = 3 + static_cast<int>(rng.uniform_below(10));
    int M = 2 + static_cast<int>(rng.uniform_below(5));
    std::vector<BaseRunResult> runs;
    for (int m = 0; m < M; ++m) {
      Vector stats(p);
      for (int i = 0; i < p; ++i) stats(i) = rng.normal();
      runs.push_back(make_run(std::move(stats), 1, 0.1));
    }
    Ensemble e = make_ensemble(runs, 0.1, trial);
    AggregatedScores before = aggregate(e, AggregationKind::Mean);

    int i = static_cast<int>(rng.uniform_below(p));
    int m = static_cast<int>(rng.uniform_below(M));
    runs[m].stats(i) += 1.0 + rng.uniform();
    Ensemble e2 = make_ensemble(std::move(runs), 0.1, trial);
    AggregatedScores after = aggregate(e2, AggregationKind::Mean);

    CHECK(after.values(i) >= before.values(i));
    CHECK(after.ranks[i] <= before.ranks[i]);
  }
}

TEST_CASE("selection is invariant to monotone transforms of the scores") {
  RngStream rng(233, 0);
  int p = 20;
  Vector g(p);
  for (int i = 0; i < p; ++i) g(i) = rng.normal();
  RngStream t1(233, 1), t2(233, 1);
  std::vector<int> ranks = rank_descending(g, t1);
  Vector h(p);
  for (int i = 0; i < p; ++i) h(i) = std::atan(3.0 * g(i)) + 10.0;
  CHECK(rank_descending(h, t2) == ranks);
}

TEST_CASE("derand_select: single run reduces to e-BH, averaging conserves") {
  Vector rb = vec({5, 5, 5, 0, 0});
  CHECK(derand_select({rb}, 0.5) == ebh_select(rb, 0.5));

  CHECK(derand_select({Vector::Zero(4), Vector::Zero(4)}, 0.2).size() == 0);

  // averaging drops feature 2: mean (5, 5, 2.5, 0, 0), k_hat = 2 at 10/k = 5
  Vector rb2 = vec({5, 5, 0, 0, 0});
  SelectionSet s = derand_select({rb, rb2}, 0.5);
  CHECK(s.indices == std::vector<int>{0, 1});
}

TEST_CASE("mds_select inclusion rates and prefix rule") {
  // feature 0 selected in run 1 (s_hat 2) and not in run 2
  auto r1 = make_run(vec({5, 4, 1, 0}), 2, 0.1);
  auto r2 = make_run(vec({0, 5, 4, 1}), 2, 0.1);
  Ensemble e = make_ensemble({r1, r2}, 0.1);
  // I = (0.25, 0.5, 0.25, 0); q = 0.2 discards only the zero-rate feature
  SelectionSet s = mds_select(e, 0.2);
  CHECK(s.size() == 3);
  CHECK(s.contains(1));
  CHECK(!s.contains(3));
  // q = 0.3 can absorb one 0.25 as well
  CHECK(mds_select(e, 0.3).size() == 2);

  // all-zero inclusion rates: the entire prefix is consumed
  auto rz = make_run(vec({1, 2, 3}), 0, 0.1);
  Ensemble ez = make_ensemble({rz}, 0.1);
  CHECK(mds_select(ez, 0.1).size() == 0);
}

TEST_CASE("mds_select prefix example with q=0.1") {
  // inclusion rates (0, 0.05, 0.5, 0.45) via 20 runs with s_hat = 1
  std::vector<BaseRunResult> runs;
  for (int m = 0; m < 20; ++m) {
    Vector stats(4);
    stats.setZero();
    if (m < 1) stats(1) = 1.0;        // feature 1 once: 0.05
    else if (m < 11) stats(2) = 1.0;  // feature 2 ten times: 0.5
    else stats(3) = 1.0;              // feature 3 nine times: 0.45
    runs.push_back(make_run(std::move(stats), 1, 0.1));
  }
  Ensemble e = make_ensemble(std::move(runs), 0.1);
  SelectionSet s = mds_select(e, 0.1);
  CHECK(s.indices == std::vector<int>{2, 3});
}

TEST_CASE("mbh_select: reduction to BH and quantile aggregation") {
  Matrix single(1, 4);
  single << 0.01, 0.02, 0.5, 0.9;
  CHECK(mbh_select(single, 0.1, 1.0) ==
        bh_select(vec({0.01, 0.02, 0.5, 0.9}), 0.1));

  // P = (0.02, 0.10), gamma 0.5: Q = quantile((0.04, 0.20), 0.5) = 0.12
  Matrix two(2, 1);
  two << 0.02, 0.10;
  CHECK(mbh_select(two, 0.13, 0.5).size() == 1);
  CHECK(mbh_select(two, 0.11, 0.5).size() == 0);

  Matrix ones = Matrix::Ones(3, 5);
  CHECK(mbh_select(ones, 0.1, 0.5).size() == 0);
}
