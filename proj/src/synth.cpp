#include "psps/synth.hpp"

#include <cmath>
#include <stdexcept>

#include "psps/rng.hpp"
#include "psps/vecops.hpp"

namespace psps {

namespace {

DenseVec unit_direction(Rng& rng, int d) {
  DenseVec v(d);
  for (double& x : v) x = rng.normal();
  const double norm = l2_norm(v);
  for (double& x : v) x /= norm;
  return v;
}

}  // namespace

SparseDataset make_separable_logreg(int n, int d, std::uint64_t seed,
                                    double margin) {
  if (n <= 0 || d <= 0 || margin <= 0.0)
    throw std::invalid_argument("make_separable_logreg: bad arguments");
  Rng rng(seed);
  const DenseVec w_star = unit_direction(rng, d);

  SparseDataset data;
  data.d = d;
  data.rows.reserve(n);
  data.labels.reserve(n);
  for (int i = 0; i < n; ++i) {
    DenseVec x(d);
    for (double& v : x) v = rng.normal();
    double t = dot(x, w_star);
    if (t == 0.0) t = margin;  // measure-zero tie
    // shift along w* until |x'w*| >= margin
    if (std::abs(t) < margin) {
      const double push = (margin - std::abs(t)) * (t > 0.0 ? 1.0 : -1.0);
      axpy(push, w_star, x);
      t += push;
    }
    SparseRow row;
    row.reserve(d);
    for (int j = 0; j < d; ++j) row.push_back({j, x[j]});
    data.rows.push_back(std::move(row));
    data.labels.push_back(t > 0.0 ? 1.0 : -1.0);
  }
  return data;
}

SparseDataset make_onehot_categorical(int n, int groups, int total_columns,
                                      std::uint64_t seed) {
  if (n <= 0 || groups <= 0 || total_columns < groups)
    throw std::invalid_argument("make_onehot_categorical: bad arguments");
  Rng rng(seed);

  // Distribute the columns over the groups as evenly as possible; each group
  // gets at least one category.
  std::vector<int> group_size(groups, total_columns / groups);
  for (int g = 0; g < total_columns % groups; ++g) ++group_size[g];

  DenseVec w_star(total_columns);
  for (double& v : w_star) v = rng.normal();

  SparseDataset data;
  data.d = total_columns;
  data.rows.reserve(n);
  data.labels.reserve(n);
  for (int i = 0; i < n; ++i) {
    SparseRow row;
    row.reserve(groups);
    double margin = 0.0;
    int base = 0;
    for (int g = 0; g < groups; ++g) {
      const int cat = static_cast<int>(rng.bounded(group_size[g]));
      row.push_back({base + cat, 1.0});
      margin += w_star[base + cat];
      base += group_size[g];
    }
    data.rows.push_back(std::move(row));
    data.labels.push_back(margin >= 0.0 ? 1.0 : -1.0);
  }
  return data;
}

SparseDataset make_dense_planted(int n, int d, std::uint64_t seed,
                                 double label_noise) {
  if (n <= 0 || d <= 0 || label_noise < 0.0 || label_noise >= 0.5)
    throw std::invalid_argument("make_dense_planted: bad arguments");
  Rng rng(seed);
  const DenseVec w_star = unit_direction(rng, d);

  SparseDataset data;
  data.d = d;
  data.rows.reserve(n);
  data.labels.reserve(n);
  for (int i = 0; i < n; ++i) {
    DenseVec x(d);
    for (double& v : x) v = rng.normal();
    const double t = dot(x, w_star) * std::sqrt(static_cast<double>(d)) / 4.0;
    double label = (t + rng.normal() >= 0.0) ? 1.0 : -1.0;
    if (rng.uniform01() < label_noise) label = -label;
    SparseRow row;
    row.reserve(d);
    for (int j = 0; j < d; ++j) row.push_back({j, x[j]});
    data.rows.push_back(std::move(row));
    data.labels.push_back(label);
  }
  return data;
}

}  // namespace psps
