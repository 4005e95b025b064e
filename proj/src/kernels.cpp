#include "odmrpol/kernels.hpp"

#include <atomic>
#include <cstdlib>

namespace odmrpol::kernels {
namespace {

std::atomic<const Table*> g_active{nullptr};

const Table* pick(std::string_view name) {
    if (name == "scalar") return &scalar_table();
    if (name == "avx2") return avx2_table();
    if (name == "auto") {
        const Table* a = avx2_table();
        return a ? a : &scalar_table();
    }
    return nullptr;
}

const Table* initial_pick() {
    const char* env = std::getenv("ODMRPOL_KERNELS");
    if (env) {
        if (const Table* t = pick(env)) return t;
    }
    return pick("auto");
}

}  // namespace

const Table& active_table() {
    const Table* t = g_active.load(std::memory_order_acquire);
    if (!t) {
        t = initial_pick();
        g_active.store(t, std::memory_order_release);
    }
    return *t;
}

bool select_table(std::string_view name) {
    const Table* t = pick(name);
    if (!t) return false;
    g_active.store(t, std::memory_order_release);
    return true;
}

}  // namespace odmrpol::kernels
