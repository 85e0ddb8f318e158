#include "ew/kernels.hpp"

#include "kernels_internal.hpp"

namespace ew::kernels {
namespace {

struct Registry {
    Funcs scalar = scalar_funcs();
    Funcs active = scalar;
    std::string_view name = "scalar";

    Registry() { pick_auto(); }

    void pick_auto() noexcept {
#if EW_HAVE_AVX2_TU
        if (cpu_has_avx2()) {
            active = avx2_funcs();
            name = "avx2";
            return;
        }
#endif
        active = scalar;
        name = "scalar";
    }
};

Registry& registry() noexcept {
    static Registry r;
    return r;
}

}  // namespace

bool cpu_has_avx2() noexcept {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

const Funcs& scalar() noexcept { return registry().scalar; }
const Funcs& active() noexcept { return registry().active; }
std::string_view active_name() noexcept { return registry().name; }

bool select(std::string_view name) noexcept {
    Registry& r = registry();
    if (name == "auto") {
        r.pick_auto();
        return true;
    }
    if (name == "scalar") {
        r.active = r.scalar;
        r.name = "scalar";
        return true;
    }
#if EW_HAVE_AVX2_TU
    if (name == "avx2" && cpu_has_avx2()) {
        r.active = avx2_funcs();
        r.name = "avx2";
        return true;
    }
#endif
    return false;
}

}  // namespace ew::kernels
