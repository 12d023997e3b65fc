#pragma once

#include "gradsense/kernels.hpp"

namespace gradsense::kernels::detail {

#if defined(GRADSENSE_HAVE_AVX2)
// Defined in kernels_avx2.cpp, which is the only translation unit built with -mavx2.
const KernelTable& avx2_table();
#endif

}  // namespace gradsense::kernels::detail
