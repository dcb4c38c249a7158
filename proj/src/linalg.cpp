#include "eagle/linalg.hpp"

#include <cmath>
#include <vector>

#include "eagle/errors.hpp"

namespace eagle {

SparseMatrix bool_spgemm(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.cols() != b.rows()) throw DataError("bool_spgemm: shape mismatch");
  std::vector<Triplet> out;
  std::vector<char> marked(b.cols(), 0);
  std::vector<std::size_t> touched;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    touched.clear();
    for (std::size_t k : a.row_cols(i)) {
      for (std::size_t j : b.row_cols(k)) {
        if (!marked[j]) {
          marked[j] = 1;
          touched.push_back(j);
        }
      }
    }
    for (std::size_t j : touched) {
      out.push_back({i, j, 1.0});
      marked[j] = 0;
    }
  }
  return SparseMatrix::from_triplets(a.rows(), b.cols(), std::move(out));
}

NormalizedAdjacency normalize_adjacency(const SparseMatrix& a) {
  if (a.rows() != a.cols()) {
    throw DataError("normalize_adjacency: input must be square");
  }
  const std::size_t n = a.rows();
  // A-tilde = A OR I: binary self-looped adjacency regardless of whether
  // the input already carries diagonal entries.
  std::vector<Triplet> self_looped;
  self_looped.reserve(a.nnz() + n);
  for (std::size_t i = 0; i < n; ++i) {
    bool has_diag = false;
    for (std::size_t j : a.row_cols(i)) {
      self_looped.push_back({i, j, 1.0});
      if (j == i) has_diag = true;
    }
    if (!has_diag) self_looped.push_back({i, i, 1.0});
  }
  SparseMatrix tilde =
      SparseMatrix::from_triplets(n, n, std::move(self_looped));

  // Every row holds at least its diagonal entry.
  std::vector<double> inv_sqrt_deg(n);
  for (std::size_t i = 0; i < n; ++i) {
    inv_sqrt_deg[i] =
        1.0 / std::sqrt(static_cast<double>(tilde.row_cols(i).size()));
  }

  std::vector<Triplet> scaled;
  scaled.reserve(tilde.nnz());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j : tilde.row_cols(i)) {
      scaled.push_back({i, j, inv_sqrt_deg[i] * inv_sqrt_deg[j]});
    }
  }
  NormalizedAdjacency result(
      SparseMatrix::from_triplets(n, n, std::move(scaled)));
  return result;
}

DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& h) {
  if (a.cols() != h.rows()) throw DataError("spmm: shape mismatch");
  DenseMatrix out(a.rows(), h.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto out_row = out.row(i);
    const auto cols = a.row_cols(i);
    const auto vals = a.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const double v = vals[k];
      const auto h_row = h.row(cols[k]);
      for (std::size_t j = 0; j < h_row.size(); ++j) out_row[j] += v * h_row[j];
    }
  }
  return out;
}

DenseMatrix spmm(const NormalizedAdjacency& a, const DenseMatrix& h) {
  return spmm(a.matrix(), h);
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw DataError("matmul: shape mismatch");
  DenseMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto out_row = out.row(i);
    const auto a_row = a.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double v = a_row[k];
      if (v == 0.0) continue;
      const auto b_row = b.row(k);
      for (std::size_t j = 0; j < b_row.size(); ++j) out_row[j] += v * b_row[j];
    }
  }
  return out;
}

DenseMatrix matmul_transpose_a(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows()) throw DataError("matmul_transpose_a: shape mismatch");
  DenseMatrix out(a.cols(), b.cols());
  for (std::size_t k = 0; k < a.rows(); ++k) {
    const auto a_row = a.row(k);
    const auto b_row = b.row(k);
    for (std::size_t i = 0; i < a_row.size(); ++i) {
      const double v = a_row[i];
      if (v == 0.0) continue;
      auto out_row = out.row(i);
      for (std::size_t j = 0; j < b_row.size(); ++j) out_row[j] += v * b_row[j];
    }
  }
  return out;
}

DenseMatrix matmul_transpose_b(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.cols()) throw DataError("matmul_transpose_b: shape mismatch");
  DenseMatrix out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto a_row = a.row(i);
    auto out_row = out.row(i);
    for (std::size_t j = 0; j < b.rows(); ++j) {
      const auto b_row = b.row(j);
      double acc = 0.0;
      for (std::size_t k = 0; k < a_row.size(); ++k) acc += a_row[k] * b_row[k];
      out_row[j] = acc;
    }
  }
  return out;
}

double frobenius_sq(const DenseMatrix& a, const DenseMatrix& b) {
  if (!a.same_shape(b)) throw DataError("frobenius_sq: shape mismatch");
  double acc = 0.0;
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) {
    const double d = av[i] - bv[i];
    acc += d * d;
  }
  return acc;
}

double row_l2(const DenseMatrix& a, const DenseMatrix& b, std::size_t row) {
  if (!a.same_shape(b)) throw DataError("row_l2: shape mismatch");
  if (row >= a.rows()) throw DataError("row_l2: row out of range");
  const auto ar = a.row(row);
  const auto br = b.row(row);
  double acc = 0.0;
  for (std::size_t j = 0; j < ar.size(); ++j) {
    const double d = ar[j] - br[j];
    acc += d * d;
  }
  return std::sqrt(acc);
}

}  // namespace eagle
