#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "psps/vecops.hpp"

namespace psps {

struct SparseEntry {
  int index;  // 0-based column
  double value;
};

// Indices within a row are strictly increasing.
using SparseRow = std::vector<SparseEntry>;

struct SparseDataset {
  int d = 0;
  std::vector<SparseRow> rows;
  std::vector<double> labels;

  int n() const { return static_cast<int>(rows.size()); }
};

// Realized column multipliers e_j = exp(u_j), u_j ~ U[-k, k], kept for audit.
struct ScalingSpec {
  double k = 0.0;
  std::uint64_t seed = 0;
  DenseVec multipliers;
};

enum class LabelConvention { PlusMinusOne, ZeroOne };

// LIBSVM text: one sample per line, `<label> <idx>:<val> ...`, indices
// 1-based and strictly increasing. Stored 0-based. d is the largest
// observed index unless d_override > 0 asks for trailing zero columns.
// Raw labels are kept as parsed; use remap_labels before building a loss.
SparseDataset parse_libsvm(std::istream& in, int d_override = 0);
SparseDataset parse_libsvm_file(const std::string& path, int d_override = 0);

void write_libsvm(const SparseDataset& data, std::ostream& out);
void write_libsvm_file(const SparseDataset& data, const std::string& path);

// Order-preserving: the smaller of the two raw label values maps to -1
// (or 0), the larger to +1 (or 1). Requires exactly two distinct values.
SparseDataset remap_labels(const SparseDataset& data, LabelConvention target);

// Multiplies column j by e_j = exp(u_j), u_j ~ U[-k, k] drawn in column
// order from Rng(seed). k = 0 leaves the data unchanged. Labels untouched.
std::pair<SparseDataset, ScalingSpec> scale_columns(const SparseDataset& data,
                                                    double k,
                                                    std::uint64_t seed);

inline double row_dot(const SparseRow& row, const DenseVec& w) {
  double s = 0.0;
  for (const auto& e : row) s += e.value * w[e.index];
  return s;
}

}  // namespace psps
