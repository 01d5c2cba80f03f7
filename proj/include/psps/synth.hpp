#pragma once

#include <cstdint>

#include "psps/dataset.hpp"

namespace psps {

// Deterministic synthetic datasets (labels +/-1).

// Dense gaussian rows pushed to margin-separability: every row satisfies
// |x_i' w*| >= margin for a hidden unit vector w*, so the logistic loss can
// be driven to zero along w*.
SparseDataset make_separable_logreg(int n, int d, std::uint64_t seed,
                                    double margin = 1.0);

// One-hot categorical rows: `groups` attribute groups whose cardinalities
// sum to total_columns, exactly one active indicator per group. Labels come
// from a hidden linear rule over the indicators, so the set is separable.
// Defaults mirror the shape of the LIBSVM mushrooms matrix (8124 x 112
// indicators from 22 attributes).
SparseDataset make_onehot_categorical(int n = 8124, int groups = 22,
                                      int total_columns = 112,
                                      std::uint64_t seed = 7);

// Dense gaussian rows with a planted direction and optional label noise;
// shaped like a small wide microarray matrix (62 x 2000 by default).
SparseDataset make_dense_planted(int n = 62, int d = 2000,
                                 std::uint64_t seed = 7,
                                 double label_noise = 0.05);

}  // namespace psps
