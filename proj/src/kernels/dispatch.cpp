#include <atomic>
#include <string>

#include "cfj/error.hpp"
#include "kernels_impl.hpp"

namespace cfj::kernels {
namespace {

std::atomic<Isa>& selected() {
  static std::atomic<Isa> isa{best_supported_isa()};
  return isa;
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCategory::dimension, std::string("kernel size mismatch: ") + what);
}

}  // namespace

std::string_view to_string(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "unknown";
}

bool isa_supported(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(CFJ_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

Isa best_supported_isa() noexcept {
  return isa_supported(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

Isa active_isa() noexcept { return selected().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
  if (!isa_supported(isa)) {
    throw Error(ErrorCategory::range,
                "kernel ISA '" + std::string(to_string(isa)) + "' is not supported on this CPU");
  }
  selected().store(isa, std::memory_order_relaxed);
}

const KernelTable& kernel_table(Isa isa) {
  if (!isa_supported(isa)) {
    throw Error(ErrorCategory::range,
                "kernel ISA '" + std::string(to_string(isa)) + "' is not supported on this CPU");
  }
#if defined(CFJ_HAVE_AVX2_KERNELS)
  if (isa == Isa::avx2) return avx2::table();
#endif
  return scalar::table();
}

const KernelTable& active_table() noexcept {
#if defined(CFJ_HAVE_AVX2_KERNELS)
  if (active_isa() == Isa::avx2) return avx2::table();
#endif
  return scalar::table();
}

void matmul(std::span<const double> a, std::span<const double> b, std::span<double> c,
            std::size_t m, std::size_t k, std::size_t n, bool accumulate) {
  require(a.size() == m * k && b.size() == k * n && c.size() == m * n, "matmul");
  active_table().matmul(m, k, n, a.data(), b.data(), c.data(), accumulate);
}

void matmul_at_b(std::span<const double> a, std::span<const double> b,
                 std::span<double> c, std::size_t m, std::size_t k, std::size_t n,
                 bool accumulate) {
  require(a.size() == m * k && b.size() == m * n && c.size() == k * n, "matmul_at_b");
  active_table().matmul_at_b(m, k, n, a.data(), b.data(), c.data(), accumulate);
}

void matmul_a_bt(std::span<const double> a, std::span<const double> b,
                 std::span<double> c, std::size_t m, std::size_t k, std::size_t n,
                 bool accumulate) {
  require(a.size() == m * k && b.size() == n * k && c.size() == m * n, "matmul_a_bt");
  active_table().matmul_a_bt(m, k, n, a.data(), b.data(), c.data(), accumulate);
}

void adam_step(std::span<double> param, std::span<const double> grad, std::span<double> m,
               std::span<double> v, const AdamCoeffs& coeffs) {
  const auto len = param.size();
  require(grad.size() == len && m.size() == len && v.size() == len, "adam_step");
  active_table().adam_step(len, param.data(), grad.data(), m.data(), v.data(), coeffs);
}

}  // namespace cfj::kernels
