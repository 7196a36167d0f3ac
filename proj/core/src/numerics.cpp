#include "graphacl/numerics.hpp"

#include <algorithm>

namespace graphacl {

double dot(const double* a, const double* b, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, int n) {
  for (int i = 0; i < n; ++i) y[i] += alpha * x[i];
}

DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& b) {
  detail::require(a.cols == b.rows, "spmm: dimension mismatch");
  DenseMatrix out(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i) {
    double* oi = out.row(i);
    for (int p = a.offs[i]; p < a.offs[i + 1]; ++p)
      axpy(a.vals[p], b.row(a.idx[p]), oi, b.cols);
  }
  return out;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  detail::require(a.cols == b.rows, "matmul: dimension mismatch");
  DenseMatrix out(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i) {
    const double* ai = a.row(i);
    double* oi = out.row(i);
    for (int k = 0; k < a.cols; ++k) {
      const double aik = ai[k];
      if (aik != 0.0) axpy(aik, b.row(k), oi, b.cols);
    }
  }
  return out;
}

DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b) {
  detail::require(a.rows == b.rows, "matmul_tn: dimension mismatch");
  DenseMatrix out(a.cols, b.cols);
  for (int k = 0; k < a.rows; ++k) {
    const double* ak = a.row(k);
    const double* bk = b.row(k);
    for (int r = 0; r < a.cols; ++r) {
      const double v = ak[r];
      if (v != 0.0) axpy(v, bk, out.row(r), b.cols);
    }
  }
  return out;
}

DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b) {
  detail::require(a.cols == b.cols, "matmul_nt: dimension mismatch");
  DenseMatrix out(a.rows, b.rows);
  for (int i = 0; i < a.rows; ++i) {
    const double* ai = a.row(i);
    double* oi = out.row(i);
    for (int j = 0; j < b.rows; ++j) oi[j] = dot(ai, b.row(j), a.cols);
  }
  return out;
}

DenseMatrix prelu(const DenseMatrix& x, double slope) {
  detail::require(std::isfinite(slope), "prelu: slope must be finite");
  DenseMatrix out(x.rows, x.cols);
  for (size_t i = 0; i < x.data.size(); ++i) {
    const double v = x.data[i];
    out.data[i] = v >= 0.0 ? v : slope * v;
  }
  return out;
}

PreluGrad prelu_backward(const DenseMatrix& x, double slope, const DenseMatrix& upstream) {
  detail::require(x.same_shape(upstream), "prelu_backward: shape mismatch");
  PreluGrad g;
  g.grad_x = DenseMatrix(x.rows, x.cols);
  for (size_t i = 0; i < x.data.size(); ++i) {
    const double v = x.data[i];
    if (v >= 0.0) {
      g.grad_x.data[i] = upstream.data[i];
    } else {
      g.grad_x.data[i] = slope * upstream.data[i];
      g.grad_slope += upstream.data[i] * v;
    }
  }
  return g;
}

DenseMatrix softmax_rows(const DenseMatrix& x) {
  DenseMatrix out(x.rows, x.cols);
  for (int i = 0; i < x.rows; ++i) {
    const double* xi = x.row(i);
    double* oi = out.row(i);
    double m = xi[0];
    for (int j = 1; j < x.cols; ++j) m = std::max(m, xi[j]);
    double sum = 0.0;
    for (int j = 0; j < x.cols; ++j) {
      oi[j] = std::exp(xi[j] - m);
      sum += oi[j];
    }
    for (int j = 0; j < x.cols; ++j) oi[j] /= sum;
  }
  return out;
}

std::vector<double> mean_rows(const DenseMatrix& x) {
  detail::require(x.rows >= 1, "mean_rows: matrix must have at least one row");
  std::vector<double> m(x.cols, 0.0);
  for (int i = 0; i < x.rows; ++i) axpy(1.0, x.row(i), m.data(), x.cols);
  for (int j = 0; j < x.cols; ++j) m[j] /= x.rows;
  return m;
}

}  // namespace graphacl
