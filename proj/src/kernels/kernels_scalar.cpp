#include <cmath>
#include <cstddef>

#include "kernels_impl.hpp"

namespace cfj::kernels::scalar {
namespace {

void matmul(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b,
            double* c, bool accumulate) {
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * n;
    if (!accumulate) {
      for (std::size_t j = 0; j < n; ++j) crow[j] = 0.0;
    }
    const double* arow = a + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = arow[p];
      const double* brow = b + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += aip * brow[j];
    }
  }
}

void matmul_at_b(std::size_t m, std::size_t k, std::size_t n, const double* a,
                 const double* b, double* c, bool accumulate) {
  if (!accumulate) {
    for (std::size_t i = 0; i < k * n; ++i) c[i] = 0.0;
  }
  for (std::size_t r = 0; r < m; ++r) {
    const double* arow = a + r * k;
    const double* brow = b + r * n;
    for (std::size_t i = 0; i < k; ++i) {
      const double ari = arow[i];
      double* crow = c + i * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += ari * brow[j];
    }
  }
}

void matmul_a_bt(std::size_t m, std::size_t k, std::size_t n, const double* a,
                 const double* b, double* c, bool accumulate) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = a + i * k;
    for (std::size_t j = 0; j < n; ++j) {
      const double* brow = b + j * k;
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += arow[p] * brow[p];
      c[i * n + j] = accumulate ? c[i * n + j] + acc : acc;
    }
  }
}

void adam_step(std::size_t len, double* param, const double* grad, double* m, double* v,
               const AdamCoeffs& co) {
  for (std::size_t i = 0; i < len; ++i) {
    const double g = grad[i];
    m[i] = co.beta1 * m[i] + (1.0 - co.beta1) * g;
    v[i] = co.beta2 * v[i] + (1.0 - co.beta2) * g * g;
    const double mhat = m[i] / co.bias_correction1;
    const double vhat = v[i] / co.bias_correction2;
    param[i] -= co.lr * mhat / (std::sqrt(vhat) + co.eps);
  }
}

constexpr KernelTable kTable{&matmul, &matmul_at_b, &matmul_a_bt, &adam_step};

}  // namespace

const KernelTable& table() noexcept { return kTable; }

}  // namespace cfj::kernels::scalar
