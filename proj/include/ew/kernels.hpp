#pragma once

#include <cstddef>
#include <string_view>

namespace ew::kernels {

// Hot-loop primitives over the raw noise-variance array.  The per-iteration
// work of the dual solver is evaluating the closed-form policy
//   p(s) = min( max(c - s, 0), s * m )        c = 1/(mu*alpha), m = e^t - 1
// across all terminals; everything else is O(log n).  Each primitive has a
// portable scalar reference and, on x86-64 with AVX2, a vectorized variant
// chosen at runtime.  policy_eval is elementwise and bit-identical across
// variants; the reductions fix their summation order per variant, so results
// are reproducible for a given kernel selection and agree across variants to
// rounding error.
struct Funcs {
    double (*policy_sum)(const double* s, std::size_t n, double c, double m);
    void (*policy_eval)(const double* s, std::size_t n, double c, double m, double* p);
    double (*sum)(const double* x, std::size_t n);
};

const Funcs& scalar() noexcept;  // reference implementation
const Funcs& active() noexcept;  // currently selected variant

std::string_view active_name() noexcept;  // "scalar" or "avx2"
bool cpu_has_avx2() noexcept;

// "auto" picks the best available variant, "scalar" / "avx2" force one.
// Returns false (leaving the selection unchanged) if the named variant is not
// available on this machine.  Not thread-safe; call before solving.
bool select(std::string_view name) noexcept;

}  // namespace ew::kernels
