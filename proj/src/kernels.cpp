#include "looplink/kernels.hpp"

#include <atomic>
#include <cassert>
#include <cstdlib>

#include "looplink/errors.hpp"
#include "kernels_detail.hpp"

namespace looplink::kernels {

namespace {

// Scalar reference kernels. The SIMD variants must match these to rounding;
// test_kernels pins the tolerance.

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

constexpr Table kScalarTable{&dot_scalar, &axpy_scalar};

Backend detect_backend() {
  if (const char* env = std::getenv("LOOPLINK_KERNELS")) {
    return parse_backend(env);
  }
#if LOOPLINK_HAVE_AVX2_TU
  if (supported(Backend::avx2)) return Backend::avx2;
#endif
#if LOOPLINK_HAVE_NEON_TU
  if (supported(Backend::neon)) return Backend::neon;
#endif
  return Backend::scalar;
}

std::atomic<const Table*> g_active{nullptr};
std::atomic<Backend> g_active_backend{Backend::scalar};

const Table* resolve_active() {
  const Table* t = g_active.load(std::memory_order_acquire);
  if (t) return t;
  set_active(detect_backend());
  return g_active.load(std::memory_order_acquire);
}

}  // namespace

namespace detail {
const Table& scalar_table() { return kScalarTable; }
}  // namespace detail

bool supported(Backend b) {
  switch (b) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
#if LOOPLINK_HAVE_AVX2_TU
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Backend::neon:
#if LOOPLINK_HAVE_NEON_TU
      return true;  // baseline on aarch64 builds
#else
      return false;
#endif
  }
  return false;
}

const Table& table(Backend b) {
  if (!supported(b)) {
    throw Error(std::string("kernel backend '") + name(b) +
                "' is not available on this CPU/build");
  }
  switch (b) {
    case Backend::scalar:
      return kScalarTable;
    case Backend::avx2:
#if LOOPLINK_HAVE_AVX2_TU
      return detail::avx2_table();
#else
      break;
#endif
    case Backend::neon:
#if LOOPLINK_HAVE_NEON_TU
      return detail::neon_table();
#else
      break;
#endif
  }
  return kScalarTable;
}

const char* name(Backend b) {
  switch (b) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
    case Backend::neon:
      return "neon";
  }
  return "?";
}

Backend parse_backend(const std::string& s) {
  if (s == "scalar") return Backend::scalar;
  if (s == "avx2") return Backend::avx2;
  if (s == "neon") return Backend::neon;
  throw Error("unknown kernel backend '" + s + "' (scalar|avx2|neon)");
}

Backend active() {
  resolve_active();
  return g_active_backend.load(std::memory_order_acquire);
}

void set_active(Backend b) {
  const Table& t = table(b);  // validates support
  g_active_backend.store(b, std::memory_order_release);
  g_active.store(&t, std::memory_order_release);
}

double dot(const double* a, const double* b, std::size_t n) {
  return resolve_active()->dot(a, b, n);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  resolve_active()->axpy(a, x, y, n);
}

void matmul(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out) {
  assert(a.cols == b.rows);
  out.rows = a.rows;
  out.cols = b.cols;
  out.data.assign(a.rows * b.cols, 0.0);
  const Table* t = resolve_active();
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double* arow = a.row(i);
    double* orow = out.row(i);
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double aik = arow[k];
      if (aik == 0.0) continue;  // adjacency powers start sparse
      t->axpy(aik, b.row(k), orow, b.cols);
    }
  }
}

double frobenius_dot(const DenseMatrix& a, const DenseMatrix& b) {
  assert(a.rows == b.rows && a.cols == b.cols);
  return resolve_active()->dot(a.data.data(), b.data.data(), a.data.size());
}

}  // namespace looplink::kernels
