#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sagabb/error.hpp"

namespace sagabb {

using Index = Eigen::Index;

// Row of the design matrix in canonical form: strictly ascending 0-based
// indices, all < dim, no stored zeros.
struct SparseVector {
  std::vector<Index> indices;
  std::vector<double> values;
  Index dim = 0;

  std::size_t nnz() const { return indices.size(); }

  // Throws Errc::invalid_argument if the canonical-form invariants fail.
  void validate() const;

  bool operator==(const SparseVector&) const = default;
};

double squared_norm(const SparseVector& a);

template <typename Derived>
typename Derived::Scalar dot(const SparseVector& a, const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  if (x.size() != a.dim) {
    throw Error(Errc::dimension_mismatch, "dot: vector length " + std::to_string(x.size()) +
                                              " != feature dimension " + std::to_string(a.dim));
  }
  Scalar s(0);
  for (std::size_t k = 0; k < a.indices.size(); ++k) s += Scalar(a.values[k]) * x(a.indices[k]);
  return s;
}

// y += c * a
template <typename Derived>
void add_scaled(const SparseVector& a, typename Derived::Scalar c, Eigen::MatrixBase<Derived>& y) {
  for (std::size_t k = 0; k < a.indices.size(); ++k) y(a.indices[k]) += c * a.values[k];
}

Eigen::VectorXd densify(const SparseVector& a);

// Immutable after construction. Row squared norms are computed once up front
// so concurrent readers never race on a lazy cache.
class SparseDataset {
 public:
  SparseDataset(std::vector<SparseVector> rows, std::vector<double> labels, Index dim);

  Index n() const { return static_cast<Index>(rows_.size()); }
  Index dim() const { return dim_; }

  const SparseVector& row(Index i) const { return rows_[static_cast<std::size_t>(i)]; }
  double label(Index i) const { return labels_[static_cast<std::size_t>(i)]; }
  double squared_norm(Index i) const { return sq_norms_[static_cast<std::size_t>(i)]; }

  const std::vector<SparseVector>& rows() const { return rows_; }
  const std::vector<double>& labels() const { return labels_; }

  bool has_binary_labels() const;
  double max_squared_norm() const;
  double max_abs_entry_squared() const;  // max_i ||a_i||_inf^2
  std::size_t nnz() const;

  bool operator==(const SparseDataset& o) const {
    return dim_ == o.dim_ && rows_ == o.rows_ && labels_ == o.labels_;
  }

 private:
  std::vector<SparseVector> rows_;
  std::vector<double> labels_;
  std::vector<double> sq_norms_;
  Index dim_;
};

struct LibsvmOptions {
  std::optional<Index> dim;  // override; must be >= the largest index seen
  bool scale_max_abs = false;
};

SparseDataset parse_libsvm(std::istream& in, const LibsvmOptions& opts = {});
SparseDataset parse_libsvm(const std::string& text, const LibsvmOptions& opts = {});
SparseDataset load_libsvm(const std::string& path, const LibsvmOptions& opts = {});

// Writes 1-based LibSVM text using shortest round-trip number formatting.
void write_libsvm(std::ostream& out, const SparseDataset& data);

}  // namespace sagabb
