#pragma once

#include <span>

#include "psps/dataset.hpp"
#include "psps/vecops.hpp"

namespace psps {

enum class LossFamily { LogReg, Nllsq };

// Numerically stable logistic function.
inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Mini-batch value / gradient / Hessian-vector-product oracle for one loss
// family on a fixed dataset. Stateless given (w, batch); safe to share
// across threads read-only.
//
//   LogReg: (1/m) sum log(1 + exp(-y_i x_i'w)),       y_i in {-1, +1}
//   Nllsq:  (1/m) sum (y_i - sigmoid(x_i'w))^2,       y_i in {0, 1}
//
// Both losses are nonnegative with infimum 0, so the Polyak lower bound
// f_star defaults to 0.
class LossOracle {
 public:
  LossOracle(LossFamily family, const SparseDataset& data, double f_star = 0.0);

  double value(const DenseVec& w, std::span<const int> batch) const;
  DenseVec gradient(const DenseVec& w, std::span<const int> batch) const;
  DenseVec hessian_vector_product(const DenseVec& w, std::span<const int> batch,
                                  const DenseVec& z) const;

  // Whole-dataset versions (Eq. of the empirical risk).
  double full_value(const DenseVec& w) const;
  DenseVec full_gradient(const DenseVec& w) const;

  LossFamily family() const { return family_; }
  double f_star() const { return f_star_; }
  int dim() const { return data_->d; }
  const SparseDataset& data() const { return *data_; }

 private:
  void check_inputs(const DenseVec& w, std::span<const int> batch) const;

  LossFamily family_;
  const SparseDataset* data_;
  double f_star_;
};

}  // namespace psps
