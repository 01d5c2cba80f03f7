#include "psps/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "psps/errors.hpp"
#include "psps/rng.hpp"

namespace psps {

namespace {

bool parse_double(std::string_view token, double& out) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

bool parse_int(std::string_view token, long& out) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

// Shortest representation that round-trips exactly.
void append_double(std::string& out, double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  out.append(buf, ptr);
}

}  // namespace

SparseDataset parse_libsvm(std::istream& in, int d_override) {
  SparseDataset data;
  std::string line;
  int line_number = 0;
  int max_index = 0;  // 1-based

  while (std::getline(in, line)) {
    ++line_number;
    std::string_view rest(line);
    // strip comments and trailing CR
    if (auto hash = rest.find('#'); hash != std::string_view::npos)
      rest = rest.substr(0, hash);
    while (!rest.empty() && (rest.back() == '\r' || rest.back() == ' ' ||
                             rest.back() == '\t'))
      rest.remove_suffix(1);

    auto next_token = [&rest]() -> std::string_view {
      std::size_t start = 0;
      while (start < rest.size() && (rest[start] == ' ' || rest[start] == '\t'))
        ++start;
      std::size_t end = start;
      while (end < rest.size() && rest[end] != ' ' && rest[end] != '\t') ++end;
      std::string_view tok = rest.substr(start, end - start);
      rest.remove_prefix(end);
      return tok;
    };

    const std::string_view label_tok = next_token();
    if (label_tok.empty()) continue;  // blank line

    double label;
    if (!parse_double(label_tok, label))
      throw ParseError("label is not a number: '" + std::string(label_tok) + "'",
                       line_number);

    SparseRow row;
    long prev_index = 0;
    for (std::string_view tok = next_token(); !tok.empty(); tok = next_token()) {
      const std::size_t colon = tok.find(':');
      if (colon == std::string_view::npos)
        throw ParseError("expected <index>:<value>, got '" + std::string(tok) + "'",
                         line_number);
      long index;
      if (!parse_int(tok.substr(0, colon), index))
        throw ParseError("feature index is not an integer: '" +
                             std::string(tok.substr(0, colon)) + "'",
                         line_number);
      if (index <= 0)
        throw ParseError("feature index must be positive, got " +
                             std::to_string(index),
                         line_number);
      if (index <= prev_index)
        throw ParseError("feature indices must be strictly increasing (" +
                             std::to_string(prev_index) + " then " +
                             std::to_string(index) + ")",
                         line_number);
      double value;
      if (!parse_double(tok.substr(colon + 1), value))
        throw ParseError("feature value is not a number: '" +
                             std::string(tok.substr(colon + 1)) + "'",
                         line_number);
      row.push_back({static_cast<int>(index - 1), value});
      prev_index = index;
    }
    max_index = std::max(max_index, static_cast<int>(prev_index));
    data.rows.push_back(std::move(row));
    data.labels.push_back(label);
  }

  if (data.rows.empty()) throw DataError("empty dataset");

  if (d_override > 0) {
    if (d_override < max_index)
      throw ConfigError("dimension override " + std::to_string(d_override) +
                        " is smaller than the largest feature index " +
                        std::to_string(max_index));
    data.d = d_override;
  } else {
    data.d = max_index;
  }
  return data;
}

SparseDataset parse_libsvm_file(const std::string& path, int d_override) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset file: " + path);
  return parse_libsvm(in, d_override);
}

void write_libsvm(const SparseDataset& data, std::ostream& out) {
  std::string buf;
  for (int i = 0; i < data.n(); ++i) {
    buf.clear();
    const double label = data.labels[i];
    if (label == std::rint(label) && std::abs(label) < 1e15) {
      buf += std::to_string(static_cast<long long>(label));
    } else {
      append_double(buf, label);
    }
    for (const auto& e : data.rows[i]) {
      buf += ' ';
      buf += std::to_string(e.index + 1);
      buf += ':';
      append_double(buf, e.value);
    }
    buf += '\n';
    out << buf;
  }
}

void write_libsvm_file(const SparseDataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open file for writing: " + path);
  write_libsvm(data, out);
  if (!out) throw DataError("write failed: " + path);
}

SparseDataset remap_labels(const SparseDataset& data, LabelConvention target) {
  std::set<double> distinct(data.labels.begin(), data.labels.end());
  if (distinct.size() != 2)
    throw DataError("expected exactly two distinct label values, found " +
                    std::to_string(distinct.size()));
  const double lo_raw = *distinct.begin();
  const double lo = target == LabelConvention::PlusMinusOne ? -1.0 : 0.0;
  const double hi = 1.0;

  SparseDataset out = data;
  for (double& label : out.labels) label = (label == lo_raw) ? lo : hi;
  return out;
}

std::pair<SparseDataset, ScalingSpec> scale_columns(const SparseDataset& data,
                                                    double k,
                                                    std::uint64_t seed) {
  if (k < 0.0) throw ConfigError("scale factor k must be nonnegative");

  ScalingSpec spec;
  spec.k = k;
  spec.seed = seed;
  spec.multipliers.resize(data.d);
  Rng rng(seed);
  for (int j = 0; j < data.d; ++j)
    spec.multipliers[j] = std::exp(rng.uniform(-k, k));

  SparseDataset out = data;
  for (auto& row : out.rows)
    for (auto& e : row) e.value *= spec.multipliers[e.index];
  return {std::move(out), std::move(spec)};
}

}  // namespace psps
