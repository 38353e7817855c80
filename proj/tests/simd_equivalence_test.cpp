// Bit-for-bit equivalence between the scalar reference kernels and every
// vector backend available on this machine. Each comparison uses sizes that
// straddle the vector width (remainders of every length mod 4) plus the
// special values the contracts call out: signed zeros, exact ties, and
// zero gradients.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "doctest.h"
#include "ef/rng.hpp"
#include "ef/simd/kernels.hpp"

using ef::Rng;
using ef::simd::Backend;
using ef::simd::KernelTable;

namespace {

const int kSizes[] = {1, 2, 3, 4, 5, 6, 7, 8, 9, 15, 16, 17, 31, 64, 100, 1001};

std::vector<double> random_vec(Rng& rng, int n, double lo = -1.0,
                               double hi = 1.0) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

// Sprinkle the values equality bugs hide behind.
void inject_specials(std::vector<double>& v, Rng& rng) {
  for (auto& x : v) {
    const auto roll = rng.below(8);
    if (roll == 0) x = 0.0;
    else if (roll == 1) x = -0.0;
  }
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto ua = std::bit_cast<std::uint64_t>(a[i]);
    const auto ub = std::bit_cast<std::uint64_t>(b[i]);
    if (ua != ub) return false;
  }
  return true;
}

std::vector<Backend> other_backends() {
  std::vector<Backend> out;
  for (Backend b : {Backend::avx2, Backend::neon})
    if (ef::simd::backend_available(b)) out.push_back(b);
  return out;
}

void compare_backend(Backend b) {
  const KernelTable& S = ef::simd::kernels(Backend::scalar);
  const KernelTable& V = ef::simd::kernels(b);
  Rng rng(0x5eedu + static_cast<std::uint64_t>(b));

  const std::string tag = std::string("backend: ") + ef::simd::backend_name(b);
  INFO(tag);

  {  // conv1d_row and conv1d_col
    for (int taps : {1, 3, 5, 7, 13})
      for (int n : kSizes) {
        const auto k = random_vec(rng, taps);
        const auto src = random_vec(rng, n + taps - 1);
        std::vector<double> a(static_cast<std::size_t>(n)), c = a;
        S.conv1d_row(src.data(), a.data(), n, k.data(), taps);
        V.conv1d_row(src.data(), c.data(), n, k.data(), taps);
        CHECK(same_bits(a, c));

        // Column pass: taps rows of stride n.
        const auto col_src = random_vec(rng, taps * n);
        S.conv1d_col(col_src.data(), static_cast<std::size_t>(n), a.data(), n,
                     k.data(), taps);
        V.conv1d_col(col_src.data(), static_cast<std::size_t>(n), c.data(), n,
                     k.data(), taps);
        CHECK(same_bits(a, c));
      }
  }

  {  // sobel_mag_row
    for (int n : kSizes) {
      auto r0 = random_vec(rng, n + 2, 0.0, 1.0);
      auto r1 = random_vec(rng, n + 2, 0.0, 1.0);
      auto r2 = r0;  // constant columns produce exact zero magnitudes
      std::vector<double> a(static_cast<std::size_t>(n)), c = a;
      S.sobel_mag_row(r0.data(), r1.data(), r2.data(), a.data(), n);
      V.sobel_mag_row(r0.data(), r1.data(), r2.data(), c.data(), n);
      CHECK(same_bits(a, c));

      r2 = random_vec(rng, n + 2, 0.0, 1.0);
      S.sobel_mag_row(r0.data(), r1.data(), r2.data(), a.data(), n);
      V.sobel_mag_row(r0.data(), r1.data(), r2.data(), c.data(), n);
      CHECK(same_bits(a, c));
    }
  }

  {  // nearest_center3, including exact ties
    for (int k : {1, 2, 3, 16, 32})
      for (int n : kSizes) {
        auto r = random_vec(rng, n, 0.0, 1.0);
        auto g = random_vec(rng, n, 0.0, 1.0);
        auto bch = random_vec(rng, n, 0.0, 1.0);
        auto centers = random_vec(rng, 3 * k, 0.0, 1.0);
        // Duplicate centers force ties; equal coordinates force distance 0.
        if (k >= 2) {
          centers[3] = centers[0];
          centers[4] = centers[1];
          centers[5] = centers[2];
          r[0] = centers[0];
          g[0] = centers[1];
          bch[0] = centers[2];
        }
        std::vector<std::int32_t> ia(static_cast<std::size_t>(n)), ic = ia;
        std::vector<double> da(static_cast<std::size_t>(n)), dc = da;
        S.nearest_center3(r.data(), g.data(), bch.data(), n, centers.data(), k,
                          ia.data(), da.data());
        V.nearest_center3(r.data(), g.data(), bch.data(), n, centers.data(), k,
                          ic.data(), dc.data());
        CHECK(ia == ic);
        CHECK(same_bits(da, dc));

        // Null-dist variant must agree on indices too.
        S.nearest_center3(r.data(), g.data(), bch.data(), n, centers.data(), k,
                          ia.data(), nullptr);
        V.nearest_center3(r.data(), g.data(), bch.data(), n, centers.data(), k,
                          ic.data(), nullptr);
        CHECK(ia == ic);
      }
  }

  {  // signed_step_clamp, with zero and signed-zero gradients
    for (int n : kSizes) {
      auto x = random_vec(rng, n, 0.0, 1.0);
      auto g = random_vec(rng, n);
      inject_specials(g, rng);
      std::vector<double> lo(static_cast<std::size_t>(n)),
          hi(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) {
        const double e = 0.05;
        const double a = x[static_cast<std::size_t>(i)] - e;
        const double b2 = x[static_cast<std::size_t>(i)] + e;
        lo[static_cast<std::size_t>(i)] = (a > 0.0) ? a : 0.0;
        hi[static_cast<std::size_t>(i)] = (b2 < 1.0) ? b2 : 1.0;
      }
      std::vector<double> a(static_cast<std::size_t>(n)), c = a;
      S.signed_step_clamp(x.data(), g.data(), lo.data(), hi.data(), 0.01,
                          a.data(), n);
      V.signed_step_clamp(x.data(), g.data(), lo.data(), hi.data(), 0.01,
                          c.data(), n);
      CHECK(same_bits(a, c));
    }
  }

  {  // dot, sum, axpy
    for (int n : kSizes) {
      auto a = random_vec(rng, n);
      auto b2 = random_vec(rng, n);
      inject_specials(a, rng);
      CHECK(std::bit_cast<std::uint64_t>(S.dot(a.data(), b2.data(), n)) ==
            std::bit_cast<std::uint64_t>(V.dot(a.data(), b2.data(), n)));
      CHECK(std::bit_cast<std::uint64_t>(S.sum(a.data(), n)) ==
            std::bit_cast<std::uint64_t>(V.sum(a.data(), n)));

      for (double coef : {0.0, 1.0, -1.3}) {
        std::vector<double> ya = b2, yc = b2;
        S.axpy(coef, a.data(), ya.data(), n);
        V.axpy(coef, a.data(), yc.data(), n);
        CHECK(same_bits(ya, yc));
      }
    }
  }

  {  // sgd_update
    for (int n : kSizes)
      for (double mu : {0.0, 0.9})
        for (double wd : {0.0, 2e-4}) {
          const auto grad = random_vec(rng, n);
          const auto theta0 = random_vec(rng, n);
          const auto vel0 = random_vec(rng, n);
          auto ta = theta0, tc = theta0, va = vel0, vc = vel0;
          S.sgd_update(ta.data(), va.data(), grad.data(), n, 0.1, mu, wd);
          V.sgd_update(tc.data(), vc.data(), grad.data(), n, 0.1, mu, wd);
          CHECK(same_bits(ta, tc));
          CHECK(same_bits(va, vc));
        }
  }

  {  // select_merge and select_mask
    for (int n : kSizes) {
      const auto src = random_vec(rng, n);
      std::vector<std::int32_t> sel(static_cast<std::size_t>(n));
      for (auto& s : sel) {
        const std::int32_t opts[] = {1, 3, 5};
        s = opts[rng.below(3)];
      }
      for (std::int32_t match : {1, 3, 5, 7}) {
        auto base = random_vec(rng, n);
        auto ma = base, mc = base;
        S.select_merge(src.data(), sel.data(), match, ma.data(), n);
        V.select_merge(src.data(), sel.data(), match, mc.data(), n);
        CHECK(same_bits(ma, mc));

        std::vector<double> za(static_cast<std::size_t>(n)), zc = za;
        S.select_mask(src.data(), sel.data(), match, za.data(), n);
        V.select_mask(src.data(), sel.data(), match, zc.data(), n);
        CHECK(same_bits(za, zc));
      }
    }
  }
}

}  // namespace

TEST_CASE("every available vector backend is bit-identical to scalar") {
  const auto backends = other_backends();
  if (backends.empty()) {
    MESSAGE("only the scalar backend is available on this machine; "
            "nothing to compare");
    CHECK(ef::simd::backend_available(Backend::scalar));
    return;
  }
  for (Backend b : backends) compare_backend(b);
}

TEST_CASE("backend selection is sane") {
  CHECK(ef::simd::backend_available(Backend::scalar));
  const Backend original = ef::simd::active_backend();
  CHECK(ef::simd::backend_available(original));

  // Forcing an unavailable backend must throw and leave the active one alone.
  for (Backend b : {Backend::avx2, Backend::neon})
    if (!ef::simd::backend_available(b)) {
      CHECK_THROWS_AS(ef::simd::force_backend(b), std::runtime_error);
      CHECK(ef::simd::active_backend() == original);
    }

  ef::simd::force_backend(Backend::scalar);
  CHECK(ef::simd::active_backend() == Backend::scalar);
  ef::simd::force_backend(original);  // restore for any later cases
  CHECK(ef::simd::active_backend() == original);
}
