// Built with -mavx2 -mfma. Only reached through the dispatcher after CPUID
// confirms both extensions.

#include <immintrin.h>

#include <cmath>
#include <cstddef>

#include "kernels_impl.hpp"

namespace cfj::kernels::avx2 {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void matmul(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b,
            double* c, bool accumulate) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = a + i * k;
    double* crow = c + i * n;
    std::size_t j = 0;
    for (; j + 8 <= n; j += 8) {
      __m256d acc0 = accumulate ? _mm256_loadu_pd(crow + j) : _mm256_setzero_pd();
      __m256d acc1 = accumulate ? _mm256_loadu_pd(crow + j + 4) : _mm256_setzero_pd();
      for (std::size_t p = 0; p < k; ++p) {
        const __m256d av = _mm256_broadcast_sd(arow + p);
        const double* brow = b + p * n + j;
        acc0 = _mm256_fmadd_pd(av, _mm256_loadu_pd(brow), acc0);
        acc1 = _mm256_fmadd_pd(av, _mm256_loadu_pd(brow + 4), acc1);
      }
      _mm256_storeu_pd(crow + j, acc0);
      _mm256_storeu_pd(crow + j + 4, acc1);
    }
    for (; j + 4 <= n; j += 4) {
      __m256d acc = accumulate ? _mm256_loadu_pd(crow + j) : _mm256_setzero_pd();
      for (std::size_t p = 0; p < k; ++p) {
        acc = _mm256_fmadd_pd(_mm256_broadcast_sd(arow + p), _mm256_loadu_pd(b + p * n + j),
                              acc);
      }
      _mm256_storeu_pd(crow + j, acc);
    }
    for (; j < n; ++j) {
      double acc = accumulate ? crow[j] : 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += arow[p] * b[p * n + j];
      crow[j] = acc;
    }
  }
}

void matmul_at_b(std::size_t m, std::size_t k, std::size_t n, const double* a,
                 const double* b, double* c, bool accumulate) {
  for (std::size_t i = 0; i < k; ++i) {
    double* crow = c + i * n;
    std::size_t j = 0;
    for (; j + 8 <= n; j += 8) {
      __m256d acc0 = accumulate ? _mm256_loadu_pd(crow + j) : _mm256_setzero_pd();
      __m256d acc1 = accumulate ? _mm256_loadu_pd(crow + j + 4) : _mm256_setzero_pd();
      for (std::size_t r = 0; r < m; ++r) {
        const __m256d av = _mm256_broadcast_sd(a + r * k + i);
        const double* brow = b + r * n + j;
        acc0 = _mm256_fmadd_pd(av, _mm256_loadu_pd(brow), acc0);
        acc1 = _mm256_fmadd_pd(av, _mm256_loadu_pd(brow + 4), acc1);
      }
      _mm256_storeu_pd(crow + j, acc0);
      _mm256_storeu_pd(crow + j + 4, acc1);
    }
    for (; j + 4 <= n; j += 4) {
      __m256d acc = accumulate ? _mm256_loadu_pd(crow + j) : _mm256_setzero_pd();
      for (std::size_t r = 0; r < m; ++r) {
        acc = _mm256_fmadd_pd(_mm256_broadcast_sd(a + r * k + i),
                              _mm256_loadu_pd(b + r * n + j), acc);
      }
      _mm256_storeu_pd(crow + j, acc);
    }
    for (; j < n; ++j) {
      double acc = accumulate ? crow[j] : 0.0;
      for (std::size_t r = 0; r < m; ++r) acc += a[r * k + i] * b[r * n + j];
      crow[j] = acc;
    }
  }
}

void matmul_a_bt(std::size_t m, std::size_t k, std::size_t n, const double* a,
                 const double* b, double* c, bool accumulate) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = a + i * k;
    for (std::size_t j = 0; j < n; ++j) {
      const double* brow = b + j * k;
      __m256d acc = _mm256_setzero_pd();
      std::size_t p = 0;
      for (; p + 4 <= k; p += 4) {
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(arow + p), _mm256_loadu_pd(brow + p), acc);
      }
      double sum = hsum(acc);
      for (; p < k; ++p) sum += arow[p] * brow[p];
      c[i * n + j] = accumulate ? c[i * n + j] + sum : sum;
    }
  }
}

void adam_step(std::size_t len, double* param, const double* grad, double* m, double* v,
               const AdamCoeffs& co) {
  const __m256d b1 = _mm256_set1_pd(co.beta1);
  const __m256d b2 = _mm256_set1_pd(co.beta2);
  const __m256d one_b1 = _mm256_set1_pd(1.0 - co.beta1);
  const __m256d one_b2 = _mm256_set1_pd(1.0 - co.beta2);
  const __m256d bc1 = _mm256_set1_pd(co.bias_correction1);
  const __m256d bc2 = _mm256_set1_pd(co.bias_correction2);
  const __m256d lr = _mm256_set1_pd(co.lr);
  const __m256d eps = _mm256_set1_pd(co.eps);
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    const __m256d g = _mm256_loadu_pd(grad + i);
    const __m256d mv = _mm256_fmadd_pd(b1, _mm256_loadu_pd(m + i), _mm256_mul_pd(one_b1, g));
    const __m256d vv = _mm256_fmadd_pd(b2, _mm256_loadu_pd(v + i),
                                       _mm256_mul_pd(one_b2, _mm256_mul_pd(g, g)));
    _mm256_storeu_pd(m + i, mv);
    _mm256_storeu_pd(v + i, vv);
    const __m256d mhat = _mm256_div_pd(mv, bc1);
    const __m256d vhat = _mm256_div_pd(vv, bc2);
    const __m256d step =
        _mm256_div_pd(_mm256_mul_pd(lr, mhat), _mm256_add_pd(_mm256_sqrt_pd(vhat), eps));
    _mm256_storeu_pd(param + i, _mm256_sub_pd(_mm256_loadu_pd(param + i), step));
  }
  for (; i < len; ++i) {
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

}  // namespace cfj::kernels::avx2
