#include <algorithm>

#include "kernels_internal.hpp"

namespace ew::kernels {
namespace {

// Single source of truth for the per-element policy arithmetic.  The AVX2
// variant performs the same sub/max/mul/min sequence, which is what makes
// policy_eval bit-identical across variants.
inline double policy_one(double s, double c, double m) {
    return std::min(std::max(c - s, 0.0), s * m);
}

double policy_sum_scalar(const double* s, std::size_t n, double c, double m) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += policy_one(s[i], c, m);
    return acc;
}

void policy_eval_scalar(const double* s, std::size_t n, double c, double m,
                        double* p) {
    for (std::size_t i = 0; i < n; ++i) p[i] = policy_one(s[i], c, m);
}

double sum_scalar(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i];
    return acc;
}

}  // namespace

Funcs scalar_funcs() noexcept {
    return Funcs{policy_sum_scalar, policy_eval_scalar, sum_scalar};
}

}  // namespace ew::kernels
