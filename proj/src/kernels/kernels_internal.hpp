#pragma once

#include "fairspec/kernels.hpp"

namespace fairspec::kernels::detail {

const KernelTable& scalar_kernels() noexcept;
#if defined(FAIRSPEC_HAVE_AVX2)
const KernelTable& avx2_kernels() noexcept;
#endif

}  // namespace fairspec::kernels::detail
