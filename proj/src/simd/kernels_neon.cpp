// NEON (AArch64) backend. Mirrors the scalar reference's operation tree two
// lanes at a time with explicit non-fused multiply/add intrinsics. fsqrt and
// fdiv are correctly rounded, and min/max/sign are built from comparisons
// plus bit-select so the (a>b)?a:b / (a<b)?a:b semantics of the scalar
// reference hold exactly (FMAXNM-style NaN/zero handling never enters the
// picture). The blocked-4 reductions use two 2-lane accumulators standing in
// for the reference's four scalar stripes.

#include <arm_neon.h>

#include <cmath>

#include "ef/simd/kernels.hpp"

namespace ef::simd {
namespace {

inline double maxd(double a, double b) { return a > b ? a : b; }
inline double mind(double a, double b) { return a < b ? a : b; }

inline float64x2_t vmaxd(float64x2_t a, float64x2_t b) {
  return vbslq_f64(vcgtq_f64(a, b), a, b);
}
inline float64x2_t vmind(float64x2_t a, float64x2_t b) {
  return vbslq_f64(vcltq_f64(a, b), a, b);
}

void conv1d_row(const double* src, double* dst, int n, const double* k,
                int taps) {
  int i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t acc = vmulq_f64(vdupq_n_f64(k[0]), vld1q_f64(src + i));
    for (int t = 1; t < taps; ++t)
      acc = vaddq_f64(acc, vmulq_f64(vdupq_n_f64(k[t]), vld1q_f64(src + i + t)));
    vst1q_f64(dst + i, acc);
  }
  for (; i < n; ++i) {
    double acc = k[0] * src[i];
    for (int t = 1; t < taps; ++t) acc += k[t] * src[i + t];
    dst[i] = acc;
  }
}

void conv1d_col(const double* src, std::size_t stride, double* dst, int n,
                const double* k, int taps) {
  int i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t acc = vmulq_f64(vdupq_n_f64(k[0]), vld1q_f64(src + i));
    for (int t = 1; t < taps; ++t)
      acc = vaddq_f64(
          acc, vmulq_f64(vdupq_n_f64(k[t]),
                         vld1q_f64(src + static_cast<std::size_t>(t) * stride + i)));
    vst1q_f64(dst + i, acc);
  }
  for (; i < n; ++i) {
    double acc = k[0] * src[i];
    for (int t = 1; t < taps; ++t)
      acc += k[t] * src[static_cast<std::size_t>(t) * stride + i];
    dst[i] = acc;
  }
}

void sobel_mag_row(const double* r0, const double* r1, const double* r2,
                   double* dst, int n) {
  const float64x2_t two = vdupq_n_f64(2.0);
  const float64x2_t norm = vdupq_n_f64(kSobelNorm);
  int i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t a0 = vld1q_f64(r0 + i);
    const float64x2_t a1 = vld1q_f64(r0 + i + 1);
    const float64x2_t a2 = vld1q_f64(r0 + i + 2);
    const float64x2_t b0 = vld1q_f64(r1 + i);
    const float64x2_t b2 = vld1q_f64(r1 + i + 2);
    const float64x2_t c0 = vld1q_f64(r2 + i);
    const float64x2_t c1 = vld1q_f64(r2 + i + 1);
    const float64x2_t c2 = vld1q_f64(r2 + i + 2);
    const float64x2_t gx =
        vaddq_f64(vaddq_f64(vsubq_f64(a2, a0), vsubq_f64(c2, c0)),
                  vmulq_f64(two, vsubq_f64(b2, b0)));
    const float64x2_t gy =
        vaddq_f64(vaddq_f64(vsubq_f64(c0, a0), vsubq_f64(c2, a2)),
                  vmulq_f64(two, vsubq_f64(c1, a1)));
    const float64x2_t mag =
        vsqrtq_f64(vaddq_f64(vmulq_f64(gx, gx), vmulq_f64(gy, gy)));
    vst1q_f64(dst + i, vdivq_f64(mag, norm));
  }
  for (; i < n; ++i) {
    const double a0 = r0[i], a1 = r0[i + 1], a2 = r0[i + 2];
    const double b0 = r1[i], b2 = r1[i + 2];
    const double c0 = r2[i], c1 = r2[i + 1], c2 = r2[i + 2];
    const double gx = ((a2 - a0) + (c2 - c0)) + 2.0 * (b2 - b0);
    const double gy = ((c0 - a0) + (c2 - a2)) + 2.0 * (c1 - a1);
    dst[i] = std::sqrt(gx * gx + gy * gy) / kSobelNorm;
  }
}

void nearest_center3(const double* r, const double* g, const double* b, int n,
                     const double* centers, int k, std::int32_t* idx,
                     double* dist) {
  int i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t vr = vld1q_f64(r + i);
    const float64x2_t vg = vld1q_f64(g + i);
    const float64x2_t vb = vld1q_f64(b + i);
    float64x2_t dr = vsubq_f64(vr, vdupq_n_f64(centers[0]));
    float64x2_t dg = vsubq_f64(vg, vdupq_n_f64(centers[1]));
    float64x2_t db = vsubq_f64(vb, vdupq_n_f64(centers[2]));
    float64x2_t best = vaddq_f64(
        vaddq_f64(vmulq_f64(dr, dr), vmulq_f64(dg, dg)), vmulq_f64(db, db));
    float64x2_t best_j = vdupq_n_f64(0.0);
    for (int j = 1; j < k; ++j) {
      dr = vsubq_f64(vr, vdupq_n_f64(centers[3 * j + 0]));
      dg = vsubq_f64(vg, vdupq_n_f64(centers[3 * j + 1]));
      db = vsubq_f64(vb, vdupq_n_f64(centers[3 * j + 2]));
      const float64x2_t d = vaddq_f64(
          vaddq_f64(vmulq_f64(dr, dr), vmulq_f64(dg, dg)), vmulq_f64(db, db));
      const uint64x2_t lt = vcltq_f64(d, best);  // strict
      best = vbslq_f64(lt, d, best);
      best_j = vbslq_f64(lt, vdupq_n_f64(static_cast<double>(j)), best_j);
    }
    idx[i + 0] = static_cast<std::int32_t>(vgetq_lane_f64(best_j, 0));
    idx[i + 1] = static_cast<std::int32_t>(vgetq_lane_f64(best_j, 1));
    if (dist) vst1q_f64(dist + i, best);
  }
  for (; i < n; ++i) {
    double dr = r[i] - centers[0];
    double dg = g[i] - centers[1];
    double db = b[i] - centers[2];
    double best = (dr * dr + dg * dg) + db * db;
    std::int32_t best_j = 0;
    for (int j = 1; j < k; ++j) {
      dr = r[i] - centers[3 * j + 0];
      dg = g[i] - centers[3 * j + 1];
      db = b[i] - centers[3 * j + 2];
      const double d = (dr * dr + dg * dg) + db * db;
      if (d < best) {
        best = d;
        best_j = j;
      }
    }
    idx[i] = best_j;
    if (dist) dist[i] = best;
  }
}

void signed_step_clamp(const double* x, const double* g, const double* lo,
                       const double* hi, double alpha, double* dst, int n) {
  const float64x2_t zero = vdupq_n_f64(0.0);
  const float64x2_t one = vdupq_n_f64(1.0);
  const float64x2_t va = vdupq_n_f64(alpha);
  int i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t vgv = vld1q_f64(g + i);
    const uint64x2_t pos = vcgtq_f64(vgv, zero);
    const uint64x2_t neg = vcltq_f64(vgv, zero);
    const float64x2_t s = vsubq_f64(
        vreinterpretq_f64_u64(vandq_u64(pos, vreinterpretq_u64_f64(one))),
        vreinterpretq_f64_u64(vandq_u64(neg, vreinterpretq_u64_f64(one))));
    const float64x2_t y = vaddq_f64(vld1q_f64(x + i), vmulq_f64(va, s));
    const float64x2_t clamped =
        vmind(vmaxd(y, vld1q_f64(lo + i)), vld1q_f64(hi + i));
    vst1q_f64(dst + i, clamped);
  }
  for (; i < n; ++i) {
    const double s = g[i] > 0.0 ? 1.0 : (g[i] < 0.0 ? -1.0 : 0.0);
    dst[i] = mind(maxd(x[i] + alpha * s, lo[i]), hi[i]);
  }
}

double dot(const double* a, const double* b, int n) {
  float64x2_t acc01 = vdupq_n_f64(0.0);
  float64x2_t acc23 = vdupq_n_f64(0.0);
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    acc01 = vaddq_f64(acc01, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    acc23 =
        vaddq_f64(acc23, vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
  }
  double acc[4];
  vst1q_f64(acc + 0, acc01);
  vst1q_f64(acc + 2, acc23);
  if (i + 0 < n) acc[0] += a[i + 0] * b[i + 0];
  if (i + 1 < n) acc[1] += a[i + 1] * b[i + 1];
  if (i + 2 < n) acc[2] += a[i + 2] * b[i + 2];
  return (acc[0] + acc[2]) + (acc[1] + acc[3]);
}

double sum(const double* a, int n) {
  float64x2_t acc01 = vdupq_n_f64(0.0);
  float64x2_t acc23 = vdupq_n_f64(0.0);
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    acc01 = vaddq_f64(acc01, vld1q_f64(a + i));
    acc23 = vaddq_f64(acc23, vld1q_f64(a + i + 2));
  }
  double acc[4];
  vst1q_f64(acc + 0, acc01);
  vst1q_f64(acc + 2, acc23);
  if (i + 0 < n) acc[0] += a[i + 0];
  if (i + 1 < n) acc[1] += a[i + 1];
  if (i + 2 < n) acc[2] += a[i + 2];
  return (acc[0] + acc[2]) + (acc[1] + acc[3]);
}

void axpy(double a, const double* x, double* y, int n) {
  const float64x2_t va = vdupq_n_f64(a);
  int i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(y + i,
              vaddq_f64(vld1q_f64(y + i), vmulq_f64(va, vld1q_f64(x + i))));
  for (; i < n; ++i) y[i] = y[i] + a * x[i];
}

void sgd_update(double* theta, double* vel, const double* grad, int n,
                double lr, double momentum, double weight_decay) {
  const float64x2_t vlr = vdupq_n_f64(lr);
  const float64x2_t vmu = vdupq_n_f64(momentum);
  const float64x2_t vwd = vdupq_n_f64(weight_decay);
  int i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t th = vld1q_f64(theta + i);
    const float64x2_t gp =
        vaddq_f64(vld1q_f64(grad + i), vmulq_f64(vwd, th));
    const float64x2_t v = vaddq_f64(vmulq_f64(vmu, vld1q_f64(vel + i)), gp);
    vst1q_f64(vel + i, v);
    vst1q_f64(theta + i, vsubq_f64(th, vmulq_f64(vlr, v)));
  }
  for (; i < n; ++i) {
    const double gp = grad[i] + weight_decay * theta[i];
    vel[i] = momentum * vel[i] + gp;
    theta[i] = theta[i] - lr * vel[i];
  }
}

void select_merge(const double* src, const std::int32_t* sel,
                  std::int32_t match, double* dst, int n) {
  const int32x2_t vmatch = vdup_n_s32(match);
  int i = 0;
  for (; i + 2 <= n; i += 2) {
    const uint32x2_t eq = vceq_s32(vld1_s32(sel + i), vmatch);
    // sign-extend the 32-bit lane masks to 64-bit all-ones/all-zeros
    const uint64x2_t mask =
        vreinterpretq_u64_s64(vmovl_s32(vreinterpret_s32_u32(eq)));
    vst1q_f64(dst + i,
              vbslq_f64(mask, vld1q_f64(src + i), vld1q_f64(dst + i)));
  }
  for (; i < n; ++i)
    if (sel[i] == match) dst[i] = src[i];
}

void select_mask(const double* src, const std::int32_t* sel,
                 std::int32_t match, double* dst, int n) {
  const int32x2_t vmatch = vdup_n_s32(match);
  const float64x2_t zero = vdupq_n_f64(0.0);
  int i = 0;
  for (; i + 2 <= n; i += 2) {
    const uint32x2_t eq = vceq_s32(vld1_s32(sel + i), vmatch);
    const uint64x2_t mask =
        vreinterpretq_u64_s64(vmovl_s32(vreinterpret_s32_u32(eq)));
    vst1q_f64(dst + i, vbslq_f64(mask, vld1q_f64(src + i), zero));
  }
  for (; i < n; ++i) dst[i] = sel[i] == match ? src[i] : 0.0;
}

}  // namespace

namespace detail {

const KernelTable& neon_table() {
  static const KernelTable t = {
      .conv1d_row = conv1d_row,
      .conv1d_col = conv1d_col,
      .sobel_mag_row = sobel_mag_row,
      .nearest_center3 = nearest_center3,
      .signed_step_clamp = signed_step_clamp,
      .dot = dot,
      .sum = sum,
      .axpy = axpy,
      .sgd_update = sgd_update,
      .select_merge = select_merge,
      .select_mask = select_mask,
  };
  return t;
}

}  // namespace detail
}  // namespace ef::simd
