// AVX2 backend. Each kernel runs the scalar reference's operation tree on
// four lanes at a time: same multiplies, same adds, in the same order, with
// no fma. vsqrtpd/vdivpd are correctly rounded like their scalar forms, and
// maxpd/minpd implement exactly the (a>b)?a:b / (a<b)?a:b selection the
// scalar reference uses, so results match bit for bit. Loop tails re-state
// the scalar expressions verbatim.
//
// This translation unit is compiled with -mavx2 and must only be *executed*
// after a cpuid check (see dispatch.cpp).

#include <immintrin.h>

#include <cmath>

#include "ef/simd/kernels.hpp"

namespace ef::simd {
namespace {

inline double maxd(double a, double b) { return a > b ? a : b; }
inline double mind(double a, double b) { return a < b ? a : b; }

void conv1d_row(const double* src, double* dst, int n, const double* k,
                int taps) {
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d acc = _mm256_mul_pd(_mm256_set1_pd(k[0]), _mm256_loadu_pd(src + i));
    for (int t = 1; t < taps; ++t)
      acc = _mm256_add_pd(
          acc, _mm256_mul_pd(_mm256_set1_pd(k[t]), _mm256_loadu_pd(src + i + t)));
    _mm256_storeu_pd(dst + i, acc);
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
  for (; i + 4 <= n; i += 4) {
    __m256d acc = _mm256_mul_pd(_mm256_set1_pd(k[0]), _mm256_loadu_pd(src + i));
    for (int t = 1; t < taps; ++t)
      acc = _mm256_add_pd(
          acc, _mm256_mul_pd(_mm256_set1_pd(k[t]),
                             _mm256_loadu_pd(src + static_cast<std::size_t>(t) * stride + i)));
    _mm256_storeu_pd(dst + i, acc);
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
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d norm = _mm256_set1_pd(kSobelNorm);
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a0 = _mm256_loadu_pd(r0 + i);
    const __m256d a1 = _mm256_loadu_pd(r0 + i + 1);
    const __m256d a2 = _mm256_loadu_pd(r0 + i + 2);
    const __m256d b0 = _mm256_loadu_pd(r1 + i);
    const __m256d b2 = _mm256_loadu_pd(r1 + i + 2);
    const __m256d c0 = _mm256_loadu_pd(r2 + i);
    const __m256d c1 = _mm256_loadu_pd(r2 + i + 1);
    const __m256d c2 = _mm256_loadu_pd(r2 + i + 2);
    const __m256d gx =
        _mm256_add_pd(_mm256_add_pd(_mm256_sub_pd(a2, a0), _mm256_sub_pd(c2, c0)),
                      _mm256_mul_pd(two, _mm256_sub_pd(b2, b0)));
    const __m256d gy =
        _mm256_add_pd(_mm256_add_pd(_mm256_sub_pd(c0, a0), _mm256_sub_pd(c2, a2)),
                      _mm256_mul_pd(two, _mm256_sub_pd(c1, a1)));
    const __m256d mag = _mm256_sqrt_pd(
        _mm256_add_pd(_mm256_mul_pd(gx, gx), _mm256_mul_pd(gy, gy)));
    _mm256_storeu_pd(dst + i, _mm256_div_pd(mag, norm));
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
  for (; i + 4 <= n; i += 4) {
    const __m256d vr = _mm256_loadu_pd(r + i);
    const __m256d vg = _mm256_loadu_pd(g + i);
    const __m256d vb = _mm256_loadu_pd(b + i);
    __m256d dr = _mm256_sub_pd(vr, _mm256_set1_pd(centers[0]));
    __m256d dg = _mm256_sub_pd(vg, _mm256_set1_pd(centers[1]));
    __m256d db = _mm256_sub_pd(vb, _mm256_set1_pd(centers[2]));
    __m256d best =
        _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(dr, dr), _mm256_mul_pd(dg, dg)),
                      _mm256_mul_pd(db, db));
    __m256d best_j = _mm256_setzero_pd();
    for (int j = 1; j < k; ++j) {
      dr = _mm256_sub_pd(vr, _mm256_set1_pd(centers[3 * j + 0]));
      dg = _mm256_sub_pd(vg, _mm256_set1_pd(centers[3 * j + 1]));
      db = _mm256_sub_pd(vb, _mm256_set1_pd(centers[3 * j + 2]));
      const __m256d d =
          _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(dr, dr), _mm256_mul_pd(dg, dg)),
                        _mm256_mul_pd(db, db));
      const __m256d lt = _mm256_cmp_pd(d, best, _CMP_LT_OQ);  // strict
      best = _mm256_blendv_pd(best, d, lt);
      best_j = _mm256_blendv_pd(best_j, _mm256_set1_pd(static_cast<double>(j)), lt);
    }
    // Indices are small integers held exactly in doubles; truncation is exact.
    _mm_storeu_si128(reinterpret_cast<__m128i*>(idx + i),
                     _mm256_cvttpd_epi32(best_j));
    if (dist) _mm256_storeu_pd(dist + i, best);
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
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d va = _mm256_set1_pd(alpha);
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vg = _mm256_loadu_pd(g + i);
    const __m256d pos = _mm256_cmp_pd(vg, zero, _CMP_GT_OQ);
    const __m256d neg = _mm256_cmp_pd(vg, zero, _CMP_LT_OQ);
    const __m256d s =
        _mm256_sub_pd(_mm256_and_pd(pos, one), _mm256_and_pd(neg, one));
    const __m256d y =
        _mm256_add_pd(_mm256_loadu_pd(x + i), _mm256_mul_pd(va, s));
    const __m256d clamped =
        _mm256_min_pd(_mm256_max_pd(y, _mm256_loadu_pd(lo + i)),
                      _mm256_loadu_pd(hi + i));
    _mm256_storeu_pd(dst + i, clamped);
  }
  for (; i < n; ++i) {
    const double s = g[i] > 0.0 ? 1.0 : (g[i] < 0.0 ? -1.0 : 0.0);
    dst[i] = mind(maxd(x[i] + alpha * s, lo[i]), hi[i]);
  }
}

double dot(const double* a, const double* b, int n) {
  __m256d vacc = _mm256_setzero_pd();
  int i = 0;
  for (; i + 4 <= n; i += 4)
    vacc = _mm256_add_pd(
        vacc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  double acc[4];
  _mm256_storeu_pd(acc, vacc);
  if (i + 0 < n) acc[0] += a[i + 0] * b[i + 0];
  if (i + 1 < n) acc[1] += a[i + 1] * b[i + 1];
  if (i + 2 < n) acc[2] += a[i + 2] * b[i + 2];
  return (acc[0] + acc[2]) + (acc[1] + acc[3]);
}

double sum(const double* a, int n) {
  __m256d vacc = _mm256_setzero_pd();
  int i = 0;
  for (; i + 4 <= n; i += 4)
    vacc = _mm256_add_pd(vacc, _mm256_loadu_pd(a + i));
  double acc[4];
  _mm256_storeu_pd(acc, vacc);
  if (i + 0 < n) acc[0] += a[i + 0];
  if (i + 1 < n) acc[1] += a[i + 1];
  if (i + 2 < n) acc[2] += a[i + 2];
  return (acc[0] + acc[2]) + (acc[1] + acc[3]);
}

void axpy(double a, const double* x, double* y, int n) {
  const __m256d va = _mm256_set1_pd(a);
  int i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i),
                                          _mm256_mul_pd(va, _mm256_loadu_pd(x + i))));
  for (; i < n; ++i) y[i] = y[i] + a * x[i];
}

void sgd_update(double* theta, double* vel, const double* grad, int n,
                double lr, double momentum, double weight_decay) {
  const __m256d vlr = _mm256_set1_pd(lr);
  const __m256d vmu = _mm256_set1_pd(momentum);
  const __m256d vwd = _mm256_set1_pd(weight_decay);
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d th = _mm256_loadu_pd(theta + i);
    const __m256d gp = _mm256_add_pd(_mm256_loadu_pd(grad + i),
                                     _mm256_mul_pd(vwd, th));
    const __m256d v =
        _mm256_add_pd(_mm256_mul_pd(vmu, _mm256_loadu_pd(vel + i)), gp);
    _mm256_storeu_pd(vel + i, v);
    _mm256_storeu_pd(theta + i, _mm256_sub_pd(th, _mm256_mul_pd(vlr, v)));
  }
  for (; i < n; ++i) {
    const double gp = grad[i] + weight_decay * theta[i];
    vel[i] = momentum * vel[i] + gp;
    theta[i] = theta[i] - lr * vel[i];
  }
}

void select_merge(const double* src, const std::int32_t* sel,
                  std::int32_t match, double* dst, int n) {
  const __m128i vmatch = _mm_set1_epi32(match);
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m128i vs =
        _mm_loadu_si128(reinterpret_cast<const __m128i*>(sel + i));
    const __m256d mask =
        _mm256_castsi256_pd(_mm256_cvtepi32_epi64(_mm_cmpeq_epi32(vs, vmatch)));
    _mm256_storeu_pd(dst + i, _mm256_blendv_pd(_mm256_loadu_pd(dst + i),
                                               _mm256_loadu_pd(src + i), mask));
  }
  for (; i < n; ++i)
    if (sel[i] == match) dst[i] = src[i];
}

void select_mask(const double* src, const std::int32_t* sel,
                 std::int32_t match, double* dst, int n) {
  const __m128i vmatch = _mm_set1_epi32(match);
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m128i vs =
        _mm_loadu_si128(reinterpret_cast<const __m128i*>(sel + i));
    const __m256d mask =
        _mm256_castsi256_pd(_mm256_cvtepi32_epi64(_mm_cmpeq_epi32(vs, vmatch)));
    _mm256_storeu_pd(dst + i, _mm256_and_pd(_mm256_loadu_pd(src + i), mask));
  }
  for (; i < n; ++i) dst[i] = sel[i] == match ? src[i] : 0.0;
}

}  // namespace

namespace detail {

const KernelTable& avx2_table() {
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
