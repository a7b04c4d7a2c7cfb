#include <atomic>

#include "schro/kernels.hpp"

namespace schro::kern {

#if defined(SCHRO_HAVE_AVX2)
const Table& avx2_table_impl();
#endif

const Table* avx2() {
#if defined(SCHRO_HAVE_AVX2)
    static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return ok ? &avx2_table_impl() : nullptr;
#else
    return nullptr;
#endif
}

namespace {
std::atomic<bool> g_force_scalar{false};
}

void force_scalar(bool on) { g_force_scalar.store(on); }

const Table& active() {
    if (!g_force_scalar.load(std::memory_order_relaxed)) {
        if (const Table* t = avx2()) return *t;
    }
    return scalar();
}

}  // namespace schro::kern
