#pragma once

#include "eagle/dense.hpp"
#include "eagle/sparse.hpp"

namespace eagle {

// D^{-1/2} (A or I) D^{-1/2} over the self-looped binary adjacency.
// Strong type so GCN layers cannot be fed a raw, un-normalized matrix.
class NormalizedAdjacency {
 public:
  NormalizedAdjacency() = default;
  const SparseMatrix& matrix() const { return matrix_; }
  std::size_t size() const { return matrix_.rows(); }

 private:
  explicit NormalizedAdjacency(SparseMatrix m) : matrix_(std::move(m)) {}
  friend NormalizedAdjacency normalize_adjacency(const SparseMatrix& a);
  SparseMatrix matrix_;
};

NormalizedAdjacency normalize_adjacency(const SparseMatrix& a);

DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& h);
DenseMatrix spmm(const NormalizedAdjacency& a, const DenseMatrix& h);

// Dense kernels used by the fixed model graph.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix matmul_transpose_a(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix matmul_transpose_b(const DenseMatrix& a, const DenseMatrix& b);

double frobenius_sq(const DenseMatrix& a, const DenseMatrix& b);
double row_l2(const DenseMatrix& a, const DenseMatrix& b, std::size_t row);

}  // namespace eagle
