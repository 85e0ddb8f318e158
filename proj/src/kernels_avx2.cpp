// Compiled with -mavx2; only ever called after a runtime cpu check.

#include "kernels_internal.hpp"

#if EW_HAVE_AVX2_TU

#include <immintrin.h>

#include <algorithm>

namespace ew::kernels {
namespace {

inline double policy_one(double s, double c, double m) {
    return std::min(std::max(c - s, 0.0), s * m);
}

// Same operation order as the scalar kernel: sub, max(0), mul, min.
inline __m256d policy_lane(__m256d s, __m256d c, __m256d m, __m256d zero) {
    const __m256d wf = _mm256_max_pd(_mm256_sub_pd(c, s), zero);
    const __m256d plateau = _mm256_mul_pd(s, m);
    return _mm256_min_pd(wf, plateau);
}

// Two accumulators hide the add latency; the lane fold order is fixed so the
// reduction is reproducible for a given n.
inline double reduce(__m256d acc0, __m256d acc1) {
    alignas(32) double lane[4];
    _mm256_store_pd(lane, _mm256_add_pd(acc0, acc1));
    return (lane[0] + lane[2]) + (lane[1] + lane[3]);
}

double policy_sum_avx2(const double* s, std::size_t n, double c, double m) {
    const __m256d vc = _mm256_set1_pd(c);
    const __m256d vm = _mm256_set1_pd(m);
    const __m256d zero = _mm256_setzero_pd();
    __m256d acc0 = zero, acc1 = zero;
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, policy_lane(_mm256_loadu_pd(s + i), vc, vm, zero));
        acc1 = _mm256_add_pd(acc1, policy_lane(_mm256_loadu_pd(s + i + 4), vc, vm, zero));
    }
    if (i + 4 <= n) {
        acc0 = _mm256_add_pd(acc0, policy_lane(_mm256_loadu_pd(s + i), vc, vm, zero));
        i += 4;
    }
    double total = reduce(acc0, acc1);
    for (; i < n; ++i) total += policy_one(s[i], c, m);
    return total;
}

void policy_eval_avx2(const double* s, std::size_t n, double c, double m, double* p) {
    const __m256d vc = _mm256_set1_pd(c);
    const __m256d vm = _mm256_set1_pd(m);
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(p + i, policy_lane(_mm256_loadu_pd(s + i), vc, vm, zero));
    for (; i < n; ++i) p[i] = policy_one(s[i], c, m);
}

double sum_avx2(const double* x, std::size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    __m256d acc0 = zero, acc1 = zero;
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
        acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + i + 4));
    }
    if (i + 4 <= n) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
        i += 4;
    }
    double total = reduce(acc0, acc1);
    for (; i < n; ++i) total += x[i];
    return total;
}

}  // namespace

Funcs avx2_funcs() noexcept {
    return Funcs{policy_sum_avx2, policy_eval_avx2, sum_avx2};
}

}  // namespace ew::kernels

#endif  // EW_HAVE_AVX2_TU
