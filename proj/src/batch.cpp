#include "psps/batch.hpp"

#include <numeric>

#include "psps/errors.hpp"
#include "psps/rng.hpp"

namespace psps {

BatchPlan::BatchPlan(int n, int batch_size, std::uint64_t seed)
    : batch_size_(batch_size), seed_(seed) {
  if (n <= 0) throw ConfigError("batch plan needs n > 0");
  if (batch_size <= 0 || batch_size > n)
    throw ConfigError("batch size must be in [1, n], got " +
                      std::to_string(batch_size) + " for n = " +
                      std::to_string(n));
  order_.resize(n);
  reshuffle();
}

int BatchPlan::batches_per_epoch() const {
  return (n() + batch_size_ - 1) / batch_size_;
}

void BatchPlan::reshuffle() {
  std::iota(order_.begin(), order_.end(), 0);
  Rng rng(mix_seed(seed_, static_cast<std::uint64_t>(epoch_)));
  rng.shuffle(order_);
}

std::span<const int> BatchPlan::next_batch() {
  if (cursor_ >= n()) {
    ++epoch_;
    cursor_ = 0;
    reshuffle();
  }
  const int begin = cursor_;
  const int end = std::min(begin + batch_size_, n());
  cursor_ = end;
  return {order_.data() + begin, static_cast<std::size_t>(end - begin)};
}

}  // namespace psps
