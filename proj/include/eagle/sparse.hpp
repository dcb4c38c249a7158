#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "eagle/dense.hpp"
#include "eagle/errors.hpp"

namespace eagle {

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

// Compressed-row sparse matrix. Duplicate (row, col) entries are summed
// during construction; column indices within a row are sorted.
class SparseMatrix {
 public:
  SparseMatrix() = default;

  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                    std::vector<Triplet> entries) {
    for (const auto& t : entries) {
      if (t.row >= rows || t.col >= cols) {
        throw DataError("sparse entry out of bounds");
      }
    }
    std::sort(entries.begin(), entries.end(),
              [](const Triplet& a, const Triplet& b) {
                return a.row != b.row ? a.row < b.row : a.col < b.col;
              });
    SparseMatrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.row_ptr_.assign(rows + 1, 0);
    for (std::size_t i = 0; i < entries.size();) {
      std::size_t j = i;
      double sum = 0.0;
      while (j < entries.size() && entries[j].row == entries[i].row &&
             entries[j].col == entries[i].col) {
        sum += entries[j].value;
        ++j;
      }
      if (sum != 0.0) {
        m.col_idx_.push_back(entries[i].col);
        m.values_.push_back(sum);
        ++m.row_ptr_[entries[i].row + 1];
      }
      i = j;
    }
    for (std::size_t r = 0; r < rows; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  std::span<const std::size_t> row_cols(std::size_t i) const {
    return {col_idx_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
  }
  std::span<const double> row_values(std::size_t i) const {
    return {values_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
  }

  double at(std::size_t i, std::size_t j) const {
    const auto cols = row_cols(i);
    const auto it = std::lower_bound(cols.begin(), cols.end(), j);
    if (it == cols.end() || *it != j) return 0.0;
    return values_[row_ptr_[i] + static_cast<std::size_t>(it - cols.begin())];
  }

  DenseMatrix to_dense() const {
    DenseMatrix d(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
      const auto cols = row_cols(i);
      const auto vals = row_values(i);
      for (std::size_t k = 0; k < cols.size(); ++k) d(i, cols[k]) = vals[k];
    }
    return d;
  }

  SparseMatrix transposed() const {
    std::vector<Triplet> t;
    t.reserve(nnz());
    for (std::size_t i = 0; i < rows_; ++i) {
      const auto cols = row_cols(i);
      const auto vals = row_values(i);
      for (std::size_t k = 0; k < cols.size(); ++k) {
        t.push_back({cols[k], i, vals[k]});
      }
    }
    return from_triplets(cols_, rows_, std::move(t));
  }

  friend bool operator==(const SparseMatrix& a, const SparseMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ &&
           a.row_ptr_ == b.row_ptr_ && a.col_idx_ == b.col_idx_ &&
           a.values_ == b.values_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_idx_;
  std::vector<double> values_;
};

// Boolean product of two sparse 0/1 matrices: result entry is 1 where at
// least one path exists, multiplicities discarded.
SparseMatrix bool_spgemm(const SparseMatrix& a, const SparseMatrix& b);

}  // namespace eagle
