#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace psps {

// Without-replacement mini-batch schedule: each epoch visits every sample
// exactly once (last batch may be short) in a fresh permutation that is a
// pure function of (seed, epoch).
class BatchPlan {
 public:
  BatchPlan(int n, int batch_size, std::uint64_t seed);

  // Returns the next batch's sample indices; rolls over to the next epoch
  // (and reshuffles) after the last batch of the current one.
  std::span<const int> next_batch();

  int epoch() const { return epoch_; }
  int batches_per_epoch() const;
  int n() const { return static_cast<int>(order_.size()); }
  int batch_size() const { return batch_size_; }

 private:
  void reshuffle();

  std::vector<int> order_;
  int batch_size_;
  std::uint64_t seed_;
  int epoch_ = 0;
  int cursor_ = 0;
};

}  // namespace psps
