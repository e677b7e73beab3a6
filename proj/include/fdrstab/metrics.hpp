#pragma once

#include "fdrstab/types.hpp"

namespace fdrstab {

struct SelectionMetrics {
  double fdp = 0.0;
  double power = 0.0;
  int n_selected = 0;
};

struct StabilitySummary {
  double mean_fdp = 0.0, var_fdp = 0.0;
  double mean_power = 0.0, var_power = 0.0;
  double mean_n_selected = 0.0, var_n_selected = 0.0;
  double mean_pairwise_jaccard = 1.0;
};

SelectionMetrics selection_metrics(const SelectionSet& selected,
                                   const SelectionSet& truth);

// |a n b| / |a u b|, with J(empty, empty) = 1.
double jaccard(const SelectionSet& a, const SelectionSet& b);

// Mean Jaccard over all unordered pairs. Requires at least two sets.
double pairwise_jaccard(const std::vector<SelectionSet>& sets);

// Sample means and unbiased variances (0 for a single record).
StabilitySummary summarize(const std::vector<SelectionMetrics>& records,
                           const std::vector<SelectionSet>& sets);

}  // namespace fdrstab
