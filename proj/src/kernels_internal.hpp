#pragma once

#include "ew/kernels.hpp"

namespace ew::kernels {

Funcs scalar_funcs() noexcept;
#if EW_HAVE_AVX2_TU
Funcs avx2_funcs() noexcept;
#endif

}  // namespace ew::kernels
