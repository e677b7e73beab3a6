#pragma once

#include <cstdint>
#include <vector>

namespace fdrstab {

// Counter-seeded random stream. The output sequence is a pure function of
// (master_seed, stream_id), so independent workers can draw from disjoint
// streams without coordination.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  // Independent stream derived from this one's identity.
  RngStream substream(std::uint64_t id) const;

  std::uint64_t next_u64();

  // Uniform on [0, 1).
  double uniform();

  // Standard normal via Box-Muller (pair cached).
  double normal();

  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t uniform_below(std::uint64_t n);

  // Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
  std::uint64_t state_[4];  // xoshiro256**
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace fdrstab
