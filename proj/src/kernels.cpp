#include "pisac/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace pisac::kernels {
namespace {

std::atomic<const Ops*> g_active{nullptr};

const Ops* resolve(Backend backend) {
    switch (backend) {
        case Backend::Scalar:
            return &scalar_ops();
        case Backend::Avx2: {
            const Ops* ops = avx2_ops();
            if (!ops) throw std::runtime_error("avx2 kernels unavailable on this build/CPU");
            return ops;
        }
        case Backend::Auto:
        default: {
            const Ops* ops = avx2_ops();
            return ops ? ops : &scalar_ops();
        }
    }
}

Backend backend_from_env() {
    const char* env = std::getenv("PISAC_KERNELS");
    if (!env) return Backend::Auto;
    if (std::strcmp(env, "scalar") == 0) return Backend::Scalar;
    if (std::strcmp(env, "avx2") == 0) return Backend::Avx2;
    return Backend::Auto;
}

}  // namespace

const Ops& active() {
    const Ops* ops = g_active.load(std::memory_order_acquire);
    if (!ops) {
        ops = resolve(backend_from_env());
        g_active.store(ops, std::memory_order_release);
    }
    return *ops;
}

void select(Backend backend) {
    g_active.store(resolve(backend), std::memory_order_release);
}

}  // namespace pisac::kernels
