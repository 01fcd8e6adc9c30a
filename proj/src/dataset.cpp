#include "sagabb/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "sagabb/format.hpp"

namespace sagabb {

void SparseVector::validate() const {
  if (indices.size() != values.size()) {
    throw Error(Errc::invalid_argument, "sparse vector: indices and values differ in length");
  }
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] < 0 || indices[k] >= dim) {
      throw Error(Errc::invalid_argument, "sparse vector: index out of range");
    }
    if (k > 0 && indices[k] <= indices[k - 1]) {
      throw Error(Errc::invalid_argument, "sparse vector: indices not strictly ascending");
    }
    if (values[k] == 0.0) throw Error(Errc::invalid_argument, "sparse vector: stored zero");
  }
}

double squared_norm(const SparseVector& a) {
  double s = 0.0;
  for (double v : a.values) s += v * v;
  return s;
}

Eigen::VectorXd densify(const SparseVector& a) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(a.dim);
  for (std::size_t k = 0; k < a.indices.size(); ++k) out(a.indices[k]) = a.values[k];
  return out;
}

SparseDataset::SparseDataset(std::vector<SparseVector> rows, std::vector<double> labels, Index dim)
    : rows_(std::move(rows)), labels_(std::move(labels)), dim_(dim) {
  if (rows_.size() != labels_.size()) {
    throw Error(Errc::invalid_argument, "dataset: row count != label count");
  }
  if (rows_.empty()) throw Error(Errc::empty_input, "dataset: no samples");
  sq_norms_.reserve(rows_.size());
  for (auto& r : rows_) {
    if (r.dim != dim_) throw Error(Errc::dimension_mismatch, "dataset: row dim != dataset dim");
    r.validate();
    sq_norms_.push_back(sagabb::squared_norm(r));
  }
}

bool SparseDataset::has_binary_labels() const {
  return std::all_of(labels_.begin(), labels_.end(), [](double b) { return b == 1.0 || b == -1.0; });
}

double SparseDataset::max_squared_norm() const {
  return *std::max_element(sq_norms_.begin(), sq_norms_.end());
}

double SparseDataset::max_abs_entry_squared() const {
  double m = 0.0;
  for (const auto& r : rows_)
    for (double v : r.values) m = std::max(m, v * v);
  return m;
}

std::size_t SparseDataset::nnz() const {
  std::size_t s = 0;
  for (const auto& r : rows_) s += r.nnz();
  return s;
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

// {0,1} and {1,2} encodings map onto {-1,+1}; anything else is kept as is
// (ridge targets).
void remap_labels(std::vector<double>& labels) {
  std::set<double> distinct(labels.begin(), labels.end());
  auto subset_of = [&](std::initializer_list<double> allowed) {
    return std::all_of(distinct.begin(), distinct.end(), [&](double v) {
      return std::find(allowed.begin(), allowed.end(), v) != allowed.end();
    });
  };
  if (subset_of({-1.0, 1.0})) return;
  if (subset_of({0.0, 1.0})) {
    for (double& b : labels) b = b == 0.0 ? -1.0 : 1.0;
  } else if (subset_of({1.0, 2.0})) {
    for (double& b : labels) b = b == 1.0 ? -1.0 : 1.0;
  }
}

}  // namespace

SparseDataset parse_libsvm(std::istream& in, const LibsvmOptions& opts) {
  std::vector<std::vector<std::pair<Index, double>>> raw;
  std::vector<double> labels;
  Index max_index = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find('#') != std::string::npos) {
      throw ParseError(Errc::parse, lineno, "comments are not part of the LibSVM format");
    }
    auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    double label = 0.0;
    if (!parse_double(tokens[0], label) || !std::isfinite(label)) {
      throw ParseError(Errc::parse, lineno, "bad label '" + std::string(tokens[0]) + "'");
    }
    std::vector<std::pair<Index, double>> entries;
    entries.reserve(tokens.size() - 1);
    long long prev = 0;
    for (std::size_t t = 1; t < tokens.size(); ++t) {
      auto tok = tokens[t];
      auto colon = tok.find(':');
      long long idx = 0;
      double val = 0.0;
      if (colon == std::string_view::npos || !parse_int(tok.substr(0, colon), idx) ||
          !parse_double(tok.substr(colon + 1), val)) {
        throw ParseError(Errc::parse, lineno, "malformed feature '" + std::string(tok) + "'");
      }
      if (idx < 1) throw ParseError(Errc::parse, lineno, "feature indices are 1-based");
      if (idx <= prev) throw ParseError(Errc::parse, lineno, "feature indices not ascending");
      if (!std::isfinite(val)) throw ParseError(Errc::parse, lineno, "non-finite feature value");
      prev = idx;
      max_index = std::max<Index>(max_index, static_cast<Index>(idx));
      if (val != 0.0) entries.emplace_back(static_cast<Index>(idx - 1), val);
    }
    raw.push_back(std::move(entries));
    labels.push_back(label);
  }
  if (raw.empty()) throw ParseError(Errc::empty_input, 0, "empty LibSVM input");

  Index dim = max_index;
  if (opts.dim) {
    if (*opts.dim < max_index) {
      throw Error(Errc::invalid_argument, "dimension override " + std::to_string(*opts.dim) +
                                              " is smaller than the largest index " +
                                              std::to_string(max_index));
    }
    dim = *opts.dim;
  }

  std::vector<double> scale;
  if (opts.scale_max_abs) {
    scale.assign(static_cast<std::size_t>(dim), 0.0);
    for (const auto& r : raw)
      for (auto [j, v] : r) scale[j] = std::max(scale[j], std::abs(v));
  }

  std::vector<SparseVector> rows;
  rows.reserve(raw.size());
  for (auto& r : raw) {
    SparseVector sv;
    sv.dim = dim;
    sv.indices.reserve(r.size());
    sv.values.reserve(r.size());
    for (auto [j, v] : r) {
      sv.indices.push_back(j);
      sv.values.push_back(opts.scale_max_abs ? v / scale[j] : v);
    }
    rows.push_back(std::move(sv));
  }
  remap_labels(labels);
  return SparseDataset(std::move(rows), std::move(labels), dim);
}

SparseDataset parse_libsvm(const std::string& text, const LibsvmOptions& opts) {
  std::istringstream in(text);
  return parse_libsvm(in, opts);
}

SparseDataset load_libsvm(const std::string& path, const LibsvmOptions& opts) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open dataset '" + path + "'");
  return parse_libsvm(in, opts);
}

void write_libsvm(std::ostream& out, const SparseDataset& data) {
  for (Index i = 0; i < data.n(); ++i) {
    out << format_double(data.label(i));
    const auto& r = data.row(i);
    for (std::size_t k = 0; k < r.indices.size(); ++k) {
      out << ' ' << (r.indices[k] + 1) << ':' << format_double(r.values[k]);
    }
    out << '\n';
  }
}

}  // namespace sagabb
