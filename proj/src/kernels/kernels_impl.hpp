#pragma once

#include "cfj/kernels.hpp"

namespace cfj::kernels {

namespace scalar {
const KernelTable& table() noexcept;
}

#if defined(CFJ_HAVE_AVX2_KERNELS)
namespace avx2 {
const KernelTable& table() noexcept;
}
#endif

}  // namespace cfj::kernels
