#include "fdrstab/metrics.hpp"

#include <algorithm>
#include <stdexcept>

namespace fdrstab {

namespace {

void mean_var(const std::vector<double>& v, double& mean, double& var) {
  const std::size_t n = v.size();
  mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  var = 0.0;
  if (n > 1) {
    for (double x : v) var += (x - mean) * (x - mean);
    var /= (n - 1);
  }
}

}  // namespace

SelectionMetrics selection_metrics(const SelectionSet& selected,
                                   const SelectionSet& truth) {
  int true_pos = 0;
  for (int i : selected.indices)
    if (truth.contains(i)) ++true_pos;
  int false_pos = static_cast<int>(selected.size()) - true_pos;

  SelectionMetrics m;
  m.n_selected = static_cast<int>(selected.size());
  m.fdp = static_cast<double>(false_pos) / std::max<int>(m.n_selected, 1);
  m.power =
      static_cast<double>(true_pos) / std::max<int>(truth.size(), 1);
  return m;
}

double jaccard(const SelectionSet& a, const SelectionSet& b) {
  if (a.indices.empty() && b.indices.empty()) return 1.0;
  std::vector<int> inter, uni;
  std::set_intersection(a.indices.begin(), a.indices.end(), b.indices.begin(),
                        b.indices.end(), std::back_inserter(inter));
  std::set_union(a.indices.begin(), a.indices.end(), b.indices.begin(),
                 b.indices.end(), std::back_inserter(uni));
  return static_cast<double>(inter.size()) / uni.size();
}

double pairwise_jaccard(const std::vector<SelectionSet>& sets) {
  if (sets.size() < 2) throw TooFewSets("pairwise_jaccard: need >= 2 sets");
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (std::size_t j = i + 1; j < sets.size(); ++j) {
      sum += jaccard(sets[i], sets[j]);
      ++pairs;
    }
  }
  return sum / pairs;
}

StabilitySummary summarize(const std::vector<SelectionMetrics>& records,
                           const std::vector<SelectionSet>& sets) {
  if (records.empty()) throw std::invalid_argument("summarize: no records");
  std::vector<double> fdp, power, nsel;
  for (const auto& r : records) {
    fdp.push_back(r.fdp);
    power.push_back(r.power);
    nsel.push_back(r.n_selected);
  }
  StabilitySummary s;
  mean_var(fdp, s.mean_fdp, s.var_fdp);
  mean_var(power, s.mean_power, s.var_power);
  mean_var(nsel, s.mean_n_selected, s.var_n_selected);
  s.mean_pairwise_jaccard = sets.size() >= 2 ? pairwise_jaccard(sets) : 1.0;
  return s;
}

}  // namespace fdrstab
