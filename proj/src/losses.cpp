#include "psps/losses.hpp"

#include <cmath>
#include <stdexcept>

#include "psps/errors.hpp"

namespace psps {

LossOracle::LossOracle(LossFamily family, const SparseDataset& data,
                       double f_star)
    : family_(family), data_(&data), f_star_(f_star) {
  for (double y : data.labels) {
    const bool ok = family == LossFamily::LogReg ? (y == -1.0 || y == 1.0)
                                                 : (y == 0.0 || y == 1.0);
    if (!ok)
      throw DataError(family == LossFamily::LogReg
                          ? "logistic loss needs labels in {-1, +1}; remap first"
                          : "nllsq loss needs labels in {0, 1}; remap first");
  }
}

void LossOracle::check_inputs(const DenseVec& w,
                              std::span<const int> batch) const {
  if (static_cast<int>(w.size()) != data_->d)
    throw std::invalid_argument("parameter dimension mismatch");
  if (batch.empty()) throw std::invalid_argument("empty batch");
  for (int i : batch)
    if (i < 0 || i >= data_->n())
      throw std::invalid_argument("batch index out of range");
}

double LossOracle::value(const DenseVec& w, std::span<const int> batch) const {
  check_inputs(w, batch);
  double sum = 0.0;
  if (family_ == LossFamily::LogReg) {
    for (int i : batch) {
      const double t = data_->labels[i] * row_dot(data_->rows[i], w);
      // log(1 + exp(-t)) = log1p(exp(-|t|)) + max(0, -t)
      sum += std::log1p(std::exp(-std::abs(t))) + std::max(0.0, -t);
    }
  } else {
    for (int i : batch) {
      const double r = data_->labels[i] - sigmoid(row_dot(data_->rows[i], w));
      sum += r * r;
    }
  }
  return sum / static_cast<double>(batch.size());
}

DenseVec LossOracle::gradient(const DenseVec& w,
                              std::span<const int> batch) const {
  check_inputs(w, batch);
  DenseVec g(data_->d, 0.0);
  const double inv_m = 1.0 / static_cast<double>(batch.size());
  if (family_ == LossFamily::LogReg) {
    for (int i : batch) {
      const double y = data_->labels[i];
      const double t = y * row_dot(data_->rows[i], w);
      const double coeff = -y * sigmoid(-t) * inv_m;
      for (const auto& e : data_->rows[i]) g[e.index] += coeff * e.value;
    }
  } else {
    for (int i : batch) {
      const double p = sigmoid(row_dot(data_->rows[i], w));
      const double coeff =
          2.0 * (p - data_->labels[i]) * p * (1.0 - p) * inv_m;
      for (const auto& e : data_->rows[i]) g[e.index] += coeff * e.value;
    }
  }
  return g;
}

DenseVec LossOracle::hessian_vector_product(const DenseVec& w,
                                            std::span<const int> batch,
                                            const DenseVec& z) const {
  check_inputs(w, batch);
  if (z.size() != w.size())
    throw std::invalid_argument("direction dimension mismatch");
  DenseVec out(data_->d, 0.0);
  const double inv_m = 1.0 / static_cast<double>(batch.size());
  if (family_ == LossFamily::LogReg) {
    // psi(t) = log(1+exp(-t)), psi'' = sigma(t)(1-sigma(t)); the label sign
    // cancels in the second derivative.
    for (int i : batch) {
      const double t = data_->labels[i] * row_dot(data_->rows[i], w);
      const double s = sigmoid(t);
      const double coeff = s * (1.0 - s) * row_dot(data_->rows[i], z) * inv_m;
      for (const auto& e : data_->rows[i]) out[e.index] += coeff * e.value;
    }
  } else {
    // psi(t) = (y - sigma(t))^2,
    // psi'' = 2 sigma'(t)^2 + 2 (sigma(t) - y) sigma''(t),
    // sigma' = p(1-p), sigma'' = p(1-p)(1-2p).
    for (int i : batch) {
      const double p = sigmoid(row_dot(data_->rows[i], w));
      const double sp = p * (1.0 - p);
      const double spp = sp * (1.0 - 2.0 * p);
      const double psi2 = 2.0 * sp * sp + 2.0 * (p - data_->labels[i]) * spp;
      const double coeff = psi2 * row_dot(data_->rows[i], z) * inv_m;
      for (const auto& e : data_->rows[i]) out[e.index] += coeff * e.value;
    }
  }
  return out;
}

double LossOracle::full_value(const DenseVec& w) const {
  std::vector<int> all(data_->n());
  for (int i = 0; i < data_->n(); ++i) all[i] = i;
  return value(w, all);
}

DenseVec LossOracle::full_gradient(const DenseVec& w) const {
  std::vector<int> all(data_->n());
  for (int i = 0; i < data_->n(); ++i) all[i] = i;
  return gradient(w, all);
}

}  // namespace psps
