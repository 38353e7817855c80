// Scalar reference kernels. This file defines the contract: every other
// backend must reproduce these results bit for bit, so the loops below avoid
// anything the vector units would do differently -- no fma (the build also
// passes -ffp-contract=off), no reassociation, and min/max/sign written to
// match the vector instructions' operand-order semantics exactly.

#include <cmath>

#include "ef/simd/kernels.hpp"

namespace ef::simd {
namespace {

// (a>b)?a:b and (a<b)?a:b -- the selection rule of x86 maxpd/minpd, which the
// NEON backend also emulates. Distinct from std::max for signed zeros.
inline double maxd(double a, double b) { return a > b ? a : b; }
inline double mind(double a, double b) { return a < b ? a : b; }

void conv1d_row(const double* src, double* dst, int n, const double* k,
                int taps) {
  for (int i = 0; i < n; ++i) {
    double acc = k[0] * src[i];
    for (int t = 1; t < taps; ++t) acc += k[t] * src[i + t];
    dst[i] = acc;
  }
}

void conv1d_col(const double* src, std::size_t stride, double* dst, int n,
                const double* k, int taps) {
  for (int i = 0; i < n; ++i) {
    double acc = k[0] * src[i];
    for (int t = 1; t < taps; ++t)
      acc += k[t] * src[static_cast<std::size_t>(t) * stride + i];
    dst[i] = acc;
  }
}

void sobel_mag_row(const double* r0, const double* r1, const double* r2,
                   double* dst, int n) {
  for (int i = 0; i < n; ++i) {
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
  for (int i = 0; i < n; ++i) {
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
      if (d < best) {  // strict: ties keep the lower index
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
  for (int i = 0; i < n; ++i) {
    const double s = g[i] > 0.0 ? 1.0 : (g[i] < 0.0 ? -1.0 : 0.0);
    dst[i] = mind(maxd(x[i] + alpha * s, lo[i]), hi[i]);
  }
}

double dot(const double* a, const double* b, int n) {
  double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 += a[i + 0] * b[i + 0];
    acc1 += a[i + 1] * b[i + 1];
    acc2 += a[i + 2] * b[i + 2];
    acc3 += a[i + 3] * b[i + 3];
  }
  if (i + 0 < n) acc0 += a[i + 0] * b[i + 0];
  if (i + 1 < n) acc1 += a[i + 1] * b[i + 1];
  if (i + 2 < n) acc2 += a[i + 2] * b[i + 2];
  return (acc0 + acc2) + (acc1 + acc3);
}

double sum(const double* a, int n) {
  double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 += a[i + 0];
    acc1 += a[i + 1];
    acc2 += a[i + 2];
    acc3 += a[i + 3];
  }
  if (i + 0 < n) acc0 += a[i + 0];
  if (i + 1 < n) acc1 += a[i + 1];
  if (i + 2 < n) acc2 += a[i + 2];
  return (acc0 + acc2) + (acc1 + acc3);
}

void axpy(double a, const double* x, double* y, int n) {
  for (int i = 0; i < n; ++i) y[i] = y[i] + a * x[i];
}

void sgd_update(double* theta, double* vel, const double* grad, int n,
                double lr, double momentum, double weight_decay) {
  for (int i = 0; i < n; ++i) {
    const double gp = grad[i] + weight_decay * theta[i];
    vel[i] = momentum * vel[i] + gp;
    theta[i] = theta[i] - lr * vel[i];
  }
}

void select_merge(const double* src, const std::int32_t* sel,
                  std::int32_t match, double* dst, int n) {
  for (int i = 0; i < n; ++i)
    if (sel[i] == match) dst[i] = src[i];
}

void select_mask(const double* src, const std::int32_t* sel,
                 std::int32_t match, double* dst, int n) {
  for (int i = 0; i < n; ++i) dst[i] = sel[i] == match ? src[i] : 0.0;
}

}  // namespace

namespace detail {

const KernelTable& scalar_table() {
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
