#pragma once

// Dense double-precision kernels behind the batched revenue evaluator and the
// SAC networks. Every kernel has a portable scalar reference and an AVX2/FMA
// variant; the variant is chosen once at startup from CPUID and can be pinned
// with set_isa() (tests compare the two tables directly).
//
// All matrices are row-major and densely packed.

#include <cstddef>
#include <span>
#include <string_view>

namespace cfj::kernels {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa) noexcept;

bool isa_supported(Isa isa) noexcept;
Isa best_supported_isa() noexcept;

Isa active_isa() noexcept;
/// Throws cfj::Error(range) when the CPU cannot run `isa`.
void set_isa(Isa isa);

struct AdamCoeffs {
  double lr;
  double beta1;
  double beta2;
  double eps;
  double bias_correction1;  // 1 - beta1^t
  double bias_correction2;  // 1 - beta2^t
};

struct KernelTable {
  // c[m×n] = a[m×k]·b[k×n], or c += when accumulate.
  void (*matmul)(std::size_t m, std::size_t k, std::size_t n, const double* a,
                 const double* b, double* c, bool accumulate);
  // c[k×n] = aᵀ·b with a[m×k], b[m×n], or c += when accumulate.
  void (*matmul_at_b)(std::size_t m, std::size_t k, std::size_t n, const double* a,
                      const double* b, double* c, bool accumulate);
  // c[m×n] = a·bᵀ with a[m×k], b[n×k], or c += when accumulate.
  void (*matmul_a_bt)(std::size_t m, std::size_t k, std::size_t n, const double* a,
                      const double* b, double* c, bool accumulate);
  // In-place Adam step over parallel arrays of length len.
  void (*adam_step)(std::size_t len, double* param, const double* grad, double* m,
                    double* v, const AdamCoeffs& coeffs);
};

const KernelTable& kernel_table(Isa isa);
const KernelTable& active_table() noexcept;

// Span-checked front ends over the active table.

void matmul(std::span<const double> a, std::span<const double> b, std::span<double> c,
            std::size_t m, std::size_t k, std::size_t n, bool accumulate = false);
void matmul_at_b(std::span<const double> a, std::span<const double> b,
                 std::span<double> c, std::size_t m, std::size_t k, std::size_t n,
                 bool accumulate = false);
void matmul_a_bt(std::span<const double> a, std::span<const double> b,
                 std::span<double> c, std::size_t m, std::size_t k, std::size_t n,
                 bool accumulate = false);
void adam_step(std::span<double> param, std::span<const double> grad, std::span<double> m,
               std::span<double> v, const AdamCoeffs& coeffs);

}  // namespace cfj::kernels
