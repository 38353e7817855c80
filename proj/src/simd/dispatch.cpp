#include <cstdlib>
#include <stdexcept>
#include <string>

#include "ef/simd/kernels.hpp"

namespace ef::simd {

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
    case Backend::neon: return "neon";
  }
  return "?";
}

bool backend_available(Backend b) {
  switch (b) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
#ifdef EF_HAVE_AVX2
      return __builtin_cpu_supports("avx2") != 0;
#else
      return false;
#endif
    case Backend::neon:
#ifdef EF_HAVE_NEON
      return true;  // baseline on AArch64
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& kernels(Backend b) {
  if (!backend_available(b))
    throw std::runtime_error(std::string("simd backend unavailable: ") +
                             backend_name(b));
  switch (b) {
#ifdef EF_HAVE_AVX2
    case Backend::avx2:
      return detail::avx2_table();
#endif
#ifdef EF_HAVE_NEON
    case Backend::neon:
      return detail::neon_table();
#endif
    default:
      return detail::scalar_table();
  }
}

namespace {

Backend pick_default() {
  if (const char* env = std::getenv("EF_SIMD")) {
    const std::string v(env);
    Backend b;
    if (v == "scalar")
      b = Backend::scalar;
    else if (v == "avx2")
      b = Backend::avx2;
    else if (v == "neon")
      b = Backend::neon;
    else
      throw std::invalid_argument("EF_SIMD: unknown backend '" + v +
                                  "' (want scalar, avx2, or neon)");
    if (!backend_available(b))
      throw std::runtime_error(std::string("EF_SIMD: backend '") +
                               backend_name(b) +
                               "' is not available on this machine");
    return b;
  }
  if (backend_available(Backend::avx2)) return Backend::avx2;
  if (backend_available(Backend::neon)) return Backend::neon;
  return Backend::scalar;
}

Backend& active_slot() {
  static Backend b = pick_default();
  return b;
}

}  // namespace

Backend active_backend() { return active_slot(); }

void force_backend(Backend b) {
  if (!backend_available(b))
    throw std::runtime_error(std::string("simd backend unavailable: ") +
                             backend_name(b));
  active_slot() = b;
}

const KernelTable& kernels() { return kernels(active_slot()); }

}  // namespace ef::simd
