#pragma once

#include <cstddef>
#include <string>

#include "looplink/dense.hpp"

namespace looplink::kernels {

// The arithmetic inner loops (dot, axpy) exist as a scalar reference kernel
// and as SIMD variants. One backend is selected at startup: the best the CPU
// supports, or the one named in the LOOPLINK_KERNELS environment variable
// (scalar | avx2 | neon). Backends differ only in summation order, so results
// agree to rounding; the equivalence suite pins that down.
enum class Backend { scalar, avx2, neon };

struct Table {
  double (*dot)(const double* a, const double* b, std::size_t n);
  void (*axpy)(double a, const double* x, double* y, std::size_t n);  // y += a*x
};

bool supported(Backend b);
const Table& table(Backend b);  // throws Error if unsupported on this CPU
const char* name(Backend b);
Backend parse_backend(const std::string& s);  // throws Error on unknown name

Backend active();
void set_active(Backend b);  // throws Error if unsupported

double dot(const double* a, const double* b, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);

// out = a * b. Inner loop streams rows of b into rows of out via axpy.
void matmul(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out);

// sum_ij a_ij * b_ij. Equals tr(a*b) when b is symmetric.
double frobenius_dot(const DenseMatrix& a, const DenseMatrix& b);

}  // namespace looplink::kernels
