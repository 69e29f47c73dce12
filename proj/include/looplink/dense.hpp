#pragma once

#include <cstddef>
#include <vector>

namespace looplink {

// Row-major dense matrix of doubles.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double* row(std::size_t i) { return data.data() + i * cols; }
  const double* row(std::size_t i) const { return data.data() + i * cols; }

  double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  bool square() const { return rows == cols; }

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
  }
};

// Cholesky factorization A = L L^T of a symmetric positive-definite matrix,
// in place (lower triangle). Returns false if a pivot is not positive.
bool cholesky_factor(DenseMatrix& a);

// Solves L L^T x = b given the factor from cholesky_factor; b is overwritten.
void cholesky_solve(const DenseMatrix& l, std::vector<double>& b);

// Solves the SPD system a x = b. Returns false when factorization fails.
bool solve_spd(DenseMatrix a, std::vector<double> b, std::vector<double>& x);

}  // namespace looplink
