#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "helpers.hpp"
#include "looplink/dense.hpp"
#include "looplink/kernels.hpp"
#include "looplink/rng.hpp"

using namespace looplink;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = 2.0 * uniform_unit(rng) - 1.0;
  return v;
}

struct BackendGuard {
  kernels::Backend saved = kernels::active();
  ~BackendGuard() { kernels::set_active(saved); }
};

}  // namespace

TEST_CASE("backend names round-trip") {
  CHECK(kernels::parse_backend("scalar") == kernels::Backend::scalar);
  CHECK(kernels::parse_backend("avx2") == kernels::Backend::avx2);
  CHECK(kernels::parse_backend("neon") == kernels::Backend::neon);
  CHECK(std::string(kernels::name(kernels::Backend::scalar)) == "scalar");
  CHECK(kernels::supported(kernels::Backend::scalar));
}

TEST_CASE("scalar dot and axpy match the textbook forms") {
  BackendGuard guard;
  kernels::set_active(kernels::Backend::scalar);
  Rng rng(11);
  for (std::size_t n : {0u, 1u, 3u, 7u, 8u, 16u, 33u, 257u}) {
    const auto a = random_vec(rng, n);
    const auto b = random_vec(rng, n);
    const double want = std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
    CHECK(kernels::dot(a.data(), b.data(), n) == doctest::Approx(want).epsilon(1e-12));

    auto y = random_vec(rng, n);
    const auto y0 = y;
    kernels::axpy(0.37, a.data(), y.data(), n);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(y[i] == doctest::Approx(y0[i] + 0.37 * a[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("simd backends agree with scalar") {
  BackendGuard guard;
  for (auto backend : {kernels::Backend::avx2, kernels::Backend::neon}) {
    if (!kernels::supported(backend)) continue;
    Rng rng(23);
    for (std::size_t n : {1u, 2u, 5u, 8u, 15u, 16u, 17u, 64u, 100u, 1001u}) {
      const auto a = random_vec(rng, n);
      const auto b = random_vec(rng, n);
      kernels::set_active(kernels::Backend::scalar);
      const double d_scalar = kernels::dot(a.data(), b.data(), n);
      kernels::set_active(backend);
      const double d_simd = kernels::dot(a.data(), b.data(), n);
      // Both are correctly rounded up to summation order.
      CHECK(d_simd == doctest::Approx(d_scalar).epsilon(1e-13));

      auto y1 = random_vec(rng, n);
      auto y2 = y1;
      kernels::set_active(kernels::Backend::scalar);
      kernels::axpy(-1.25, a.data(), y1.data(), n);
      kernels::set_active(backend);
      kernels::axpy(-1.25, a.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(y2[i] == doctest::Approx(y1[i]).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("matmul matches the naive triple loop") {
  BackendGuard guard;
  Rng rng(31);
  for (auto backend : {kernels::Backend::scalar, kernels::Backend::avx2}) {
    if (!kernels::supported(backend)) continue;
    kernels::set_active(backend);
    for (std::size_t n : {1u, 2u, 3u, 5u, 9u}) {
      DenseMatrix a(n, n), b(n, n), out(n, n);
      for (std::size_t i = 0; i < n * n; ++i) {
        a.data[i] = std::floor(6.0 * uniform_unit(rng)) - 2.0;
        b.data[i] = std::floor(6.0 * uniform_unit(rng)) - 2.0;
      }
      kernels::matmul(a, b, out);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          double want = 0.0;
          for (std::size_t k = 0; k < n; ++k) want += a.at(i, k) * b.at(k, j);
          CHECK(out.at(i, j) == want);  // small integers, exact
        }
      }
    }
  }
}

TEST_CASE("frobenius_dot is the entrywise inner product") {
  DenseMatrix a(2, 2), b(2, 2);
  a.data = {1, 2, 3, 4};
  b.data = {5, 6, 7, 8};
  CHECK(kernels::frobenius_dot(a, b) == 5.0 + 12.0 + 21.0 + 32.0);
}

TEST_CASE("cholesky factors and solves an SPD system") {
  Rng rng(41);
  const std::size_t n = 5;
  DenseMatrix b(n, n);
  for (std::size_t i = 0; i < n * n; ++i) b.data[i] = uniform_unit(rng) - 0.5;
  // B B^T + I is SPD by construction.
  DenseMatrix spd(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = i == j ? 1.0 : 0.0;
      for (std::size_t k = 0; k < n; ++k) s += b.at(i, k) * b.at(j, k);
      spd.at(i, j) = s;
    }
  }
  std::vector<double> truth(n), rhs(n, 0.0), solved;
  for (std::size_t i = 0; i < n; ++i) truth[i] = uniform_unit(rng);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) rhs[i] += spd.at(i, j) * truth[j];
  }
  REQUIRE(solve_spd(spd, rhs, solved));
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(solved[i] == doctest::Approx(truth[i]).epsilon(1e-10));
  }
}

TEST_CASE("cholesky rejects an indefinite matrix") {
  DenseMatrix m(2, 2);
  m.data = {1.0, 2.0, 2.0, 1.0};  // eigenvalues 3 and -1
  std::vector<double> rhs{1.0, 1.0}, out;
  CHECK_FALSE(solve_spd(std::move(m), rhs, out));
}
