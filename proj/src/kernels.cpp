#include "sfm/kernels.hpp"

#include <atomic>

#include "sfm/errors.hpp"

namespace sfm::kern {
namespace {

const Ops* detect() {
#if defined(__x86_64__)
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
    return &avx2_ops();
  }
#endif
  return &scalar_ops();
}

std::atomic<const Ops*> g_active{nullptr};

}  // namespace

const Ops& active_ops() {
  const Ops* ops = g_active.load(std::memory_order_acquire);
  if (!ops) {
    ops = detect();
    g_active.store(ops, std::memory_order_release);
  }
  return *ops;
}

void force_backend(const std::string& name) {
  if (name == "auto") {
    g_active.store(detect(), std::memory_order_release);
    return;
  }
  if (name == "scalar") {
    g_active.store(&scalar_ops(), std::memory_order_release);
    return;
  }
#if defined(__x86_64__)
  if (name == "avx2") {
    if (!(__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))) {
      throw InputError("avx2 backend not supported on this CPU");
    }
    g_active.store(&avx2_ops(), std::memory_order_release);
    return;
  }
#endif
  throw InputError("unknown kernel backend: " + name);
}

}  // namespace sfm::kern
