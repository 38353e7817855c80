#pragma once

#include <cstddef>
#include <cstdint>

namespace ef::simd {

enum class Backend { scalar, avx2, neon };

/// Normalizer for the 3x3 Sobel magnitude: 4*sqrt(2), from the componentwise
/// bound |gx|,|gy| <= 4 on inputs confined to [0,1]; it keeps the normalized
/// response inside [0,1].
inline constexpr double kSobelNorm = 5.656854249492381;  // == 4*sqrt(2)

/// Function-pointer table for the hot inner loops.
///
/// Every backend is required to be bit-identical to the scalar reference, so
/// the scalar code pins an exact operation tree per output element (no
/// reassociation, no fma) and the vector backends replicate that tree
/// lane-wise. Reductions use four independent accumulators striped across
/// i mod 4 and are combined as (acc0+acc2)+(acc1+acc3); that is exactly one
/// 4-lane vector register plus its fixed horizontal fold.
struct KernelTable {
  /// dst[i] = sum_t k[t]*src[i+t] for i in [0,n). Taps accumulate in order:
  /// acc = k[0]*src[i]; acc += k[t]*src[i+t].
  void (*conv1d_row)(const double* src, double* dst, int n, const double* k,
                     int taps);

  /// Column pass over row-contiguous storage:
  /// dst[i] = sum_t k[t]*src[t*stride + i], same accumulation order.
  void (*conv1d_col)(const double* src, std::size_t stride, double* dst, int n,
                     const double* k, int taps);

  /// Fused 3x3 Sobel magnitude for one output row. r0/r1/r2 point at three
  /// consecutive padded rows; output i reads columns i, i+1, i+2:
  ///   gx = ((a2-a0) + (c2-c0)) + 2*(b2-b0)
  ///   gy = ((c0-a0) + (c2-a2)) + 2*(c1-a1)
  ///   dst[i] = sqrt(gx*gx + gy*gy) / kSobelNorm
  /// where a=r0, b=r1, c=r2 and the digit is the column offset.
  void (*sobel_mag_row)(const double* r0, const double* r1, const double* r2,
                        double* dst, int n);

  /// For each pixel i, the index of the nearest of k RGB centers
  /// (centers[3*j+c]) under squared distance (dr*dr + dg*dg) + db*db.
  /// Ties resolve to the lowest index. If dist is non-null it receives the
  /// winning squared distance.
  void (*nearest_center3)(const double* r, const double* g, const double* b,
                          int n, const double* centers, int k,
                          std::int32_t* idx, double* dist);

  /// dst[i] = min(max(x[i] + alpha*sign(g[i]), lo[i]), hi[i]) with
  /// sign(0) = 0 and min/max selecting (a<b)?a:b / (a>b)?a:b.
  void (*signed_step_clamp)(const double* x, const double* g, const double* lo,
                            const double* hi, double alpha, double* dst,
                            int n);

  double (*dot)(const double* a, const double* b, int n);
  double (*sum)(const double* a, int n);

  /// y[i] = y[i] + a*x[i]
  void (*axpy)(double a, const double* x, double* y, int n);

  /// Decoupled-from-nothing classic SGD with momentum and L2 weight decay:
  ///   gp       = grad[i] + weight_decay*theta[i]
  ///   vel[i]   = momentum*vel[i] + gp
  ///   theta[i] = theta[i] - lr*vel[i]
  void (*sgd_update)(double* theta, double* vel, const double* grad, int n,
                     double lr, double momentum, double weight_decay);

  /// dst[i] = (sel[i] == match) ? src[i] : dst[i]
  void (*select_merge)(const double* src, const std::int32_t* sel,
                       std::int32_t match, double* dst, int n);

  /// dst[i] = (sel[i] == match) ? src[i] : 0.0
  void (*select_mask)(const double* src, const std::int32_t* sel,
                      std::int32_t match, double* dst, int n);
};

const char* backend_name(Backend b);

/// True when the backend is compiled in and the CPU supports it.
bool backend_available(Backend b);

/// The backend used by kernels(). Defaults to the best available one;
/// the EF_SIMD environment variable ("scalar", "avx2", "neon") overrides
/// the choice at startup.
Backend active_backend();

/// Re-points kernels() at the given backend. Throws std::runtime_error if it
/// is not available on this machine.
void force_backend(Backend b);

const KernelTable& kernels();
const KernelTable& kernels(Backend b);

namespace detail {
const KernelTable& scalar_table();
const KernelTable& avx2_table();  // defined only when built for x86-64
const KernelTable& neon_table();  // defined only when built for AArch64
}  // namespace detail

}  // namespace ef::simd
