#include "looplink/dense.hpp"

#include <cmath>

#include "looplink/kernels.hpp"

namespace looplink {

bool cholesky_factor(DenseMatrix& a) {
  const std::size_t n = a.rows;
  for (std::size_t j = 0; j < n; ++j) {
    double* rj = a.row(j);
    const double diag = a.at(j, j) - kernels::dot(rj, rj, j);
    if (!(diag > 0.0) || !std::isfinite(diag)) return false;
    const double ljj = std::sqrt(diag);
    a.at(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double* ri = a.row(i);
      ri[j] = (ri[j] - kernels::dot(ri, rj, j)) / ljj;
    }
  }
  // Zero the strict upper triangle so the factor is self-describing.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) a.at(i, j) = 0.0;
  }
  return true;
}

void cholesky_solve(const DenseMatrix& l, std::vector<double>& b) {
  const std::size_t n = l.rows;
  for (std::size_t i = 0; i < n; ++i) {
    b[i] = (b[i] - kernels::dot(l.row(i), b.data(), i)) / l.at(i, i);
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double acc = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) acc -= l.at(k, ii) * b[k];
    b[ii] = acc / l.at(ii, ii);
  }
}

bool solve_spd(DenseMatrix a, std::vector<double> b, std::vector<double>& x) {
  if (!cholesky_factor(a)) return false;
  cholesky_solve(a, b);
  x = std::move(b);
  return true;
}

}  // namespace looplink
