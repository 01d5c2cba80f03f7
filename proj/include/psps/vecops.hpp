#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace psps {

using DenseVec = std::vector<double>;

inline double dot(const DenseVec& a, const DenseVec& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s;
}

inline double l2_norm_sq(const DenseVec& v) { return dot(v, v); }

inline double l2_norm(const DenseVec& v) { return std::sqrt(l2_norm_sq(v)); }

inline double inf_norm(const DenseVec& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline bool all_finite(const DenseVec& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

// v += alpha * u
inline void axpy(double alpha, const DenseVec& u, DenseVec& v) {
  for (std::size_t j = 0; j < v.size(); ++j) v[j] += alpha * u[j];
}

}  // namespace psps
