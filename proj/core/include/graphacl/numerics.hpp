#pragma once

#include <cmath>
#include <vector>

#include "graphacl/matrix.hpp"

namespace graphacl {

// Sparse-dense product a*b. Per output entry, terms accumulate in ascending
// column-index order, so results are bit-reproducible.
DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& b);

// Dense products. matmul_tn computes a^T * b, matmul_nt computes a * b^T;
// both accumulate per entry in ascending inner-index order. Exact zeros in
// the left operand are skipped (feature matrices here are mostly binary and
// very sparse), which never changes a finite sum.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b);

// max(x,0) + slope*min(x,0), elementwise. The derivative at exactly 0 is
// defined as 1 (the positive branch); gradient tests sample away from 0.
DenseMatrix prelu(const DenseMatrix& x, double slope);

struct PreluGrad {
  DenseMatrix grad_x;
  double grad_slope = 0.0;
};
PreluGrad prelu_backward(const DenseMatrix& x, double slope, const DenseMatrix& upstream);

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

// log(sigmoid(x)) without overflow for |x| up to ~1e3 (and beyond).
inline double log_sigmoid(double x) {
  if (x >= 0.0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

// Row-wise softmax with max subtraction.
DenseMatrix softmax_rows(const DenseMatrix& x);

// Column-wise mean; x must have at least one row.
std::vector<double> mean_rows(const DenseMatrix& x);

// Small helpers shared across modules.
double dot(const double* a, const double* b, int n);
void axpy(double alpha, const double* x, double* y, int n);  // y += alpha*x

}  // namespace graphacl
