#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace fdrstab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct NotPositiveDefinite : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularDesign : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LemmaViolation : std::logic_error {
  using std::logic_error::logic_error;
};

struct TooFewSets : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Selected feature indices, 0-based, kept sorted.
struct SelectionSet {
  std::vector<int> indices;
  int p = 0;

  SelectionSet() = default;
  SelectionSet(std::vector<int> idx, int p_) : indices(std::move(idx)), p(p_) {
    std::sort(indices.begin(), indices.end());
  }

  std::size_t size() const { return indices.size(); }
  bool contains(int i) const {
    return std::binary_search(indices.begin(), indices.end(), i);
  }
  bool operator==(const SelectionSet& other) const {
    return p == other.p && indices == other.indices;
  }
};

}  // namespace fdrstab
