#include "ef/quant.hpp"

#include <algorithm>
#include <stdexcept>

#include "ef/parallel.hpp"
#include "ef/simd/kernels.hpp"

namespace ef {

void KMeansConfig::validate() const {
  if (k < 1) throw std::invalid_argument("KMeansConfig: k must be >= 1");
  if (iterations < 1)
    throw std::invalid_argument("KMeansConfig: iterations must be >= 1");
  if (thumb_side < 1)
    throw std::invalid_argument("KMeansConfig: thumb_side must be >= 1");
}

namespace {

void check_palette(const Palette& p, const char* where) {
  if (p.k < 1 || p.centers.size() != static_cast<std::size_t>(p.k) * 3)
    throw std::invalid_argument(std::string(where) + ": malformed palette");
  for (double v : p.centers)
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument(std::string(where) +
                                  ": palette component outside [0,1]");
}

void check_rgb(const Image& img, const char* where) {
  require_valid_intensities(img, where);
  if (img.channels != 3)
    throw std::invalid_argument(std::string(where) +
                                ": 3-channel image required");
}

}  // namespace

Palette kmeans_palette(const Image& image, const KMeansConfig& cfg, Rng& rng,
                       std::vector<double>* objective_trace) {
  cfg.validate();
  check_rgb(image, "kmeans_palette");
  // area_resize only downscales, so images smaller than the nominal thumbnail
  // are clustered at their own resolution.
  const int th = std::min(cfg.thumb_side, image.height);
  const int tw = std::min(cfg.thumb_side, image.width);
  const Image thumb = area_resize(image, th, tw);
  const int n = th * tw;
  if (cfg.k > n)
    throw std::invalid_argument(
        "kmeans_palette: k exceeds the thumbnail pixel count");

  Palette pal;
  pal.k = cfg.k;
  pal.centers.resize(static_cast<std::size_t>(cfg.k) * 3);
  const auto picks = rng.sample_distinct(static_cast<std::size_t>(n),
                                         static_cast<std::size_t>(cfg.k));
  for (int j = 0; j < cfg.k; ++j)
    for (int c = 0; c < 3; ++c)
      pal.centers[3 * j + c] = thumb.plane(c)[picks[static_cast<std::size_t>(j)]];

  const auto& K = simd::kernels();
  std::vector<std::int32_t> assign(n);
  std::vector<double> dist(n);
  std::vector<double> sums(static_cast<std::size_t>(cfg.k) * 3);
  std::vector<int> counts(cfg.k);
  for (int iter = 0; iter < cfg.iterations; ++iter) {
    K.nearest_center3(thumb.plane(0), thumb.plane(1), thumb.plane(2), n,
                      pal.centers.data(), cfg.k, assign.data(), dist.data());
    if (objective_trace)
      objective_trace->push_back(K.sum(dist.data(), n) / n);
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (int i = 0; i < n; ++i) {  // fixed raster order: bit-reproducible
      const std::int32_t a = assign[i];
      sums[3 * a + 0] += thumb.plane(0)[i];
      sums[3 * a + 1] += thumb.plane(1)[i];
      sums[3 * a + 2] += thumb.plane(2)[i];
      ++counts[a];
    }
    for (int j = 0; j < cfg.k; ++j) {
      if (counts[j] == 0) continue;  // empty cluster keeps its center
      for (int c = 0; c < 3; ++c)
        pal.centers[3 * j + c] = sums[3 * j + c] / counts[j];
    }
  }
  return pal;
}

Image apply_palette(const Image& image, const Palette& palette) {
  check_rgb(image, "apply_palette");
  check_palette(palette, "apply_palette");
  const auto& K = simd::kernels();
  const int n = static_cast<int>(image.pixel_count());
  std::vector<std::int32_t> idx(n);
  const double* r = image.plane(0);
  const double* g = image.plane(1);
  const double* b = image.plane(2);
  parallel_for(n, [&](int lo, int hi) {
    K.nearest_center3(r + lo, g + lo, b + lo, hi - lo, palette.centers.data(),
                      palette.k, idx.data() + lo, nullptr);
  });
  Image out(image.height, image.width, 3);
  for (int c = 0; c < 3; ++c) {
    double* dst = out.plane(c);
    parallel_for(n, [&](int lo, int hi) {
      for (int i = lo; i < hi; ++i)
        dst[i] = palette.centers[3 * idx[i] + c];
    });
  }
  return out;
}

double reconstruction_error(const Image& image, const Palette& palette) {
  check_rgb(image, "reconstruction_error");
  check_palette(palette, "reconstruction_error");
  const auto& K = simd::kernels();
  const int n = static_cast<int>(image.pixel_count());
  std::vector<std::int32_t> idx(n);
  std::vector<double> dist(n);
  parallel_for(n, [&](int lo, int hi) {
    K.nearest_center3(image.plane(0) + lo, image.plane(1) + lo,
                      image.plane(2) + lo, hi - lo, palette.centers.data(),
                      palette.k, idx.data() + lo, dist.data() + lo);
  });
  return K.sum(dist.data(), n) / n;
}

}  // namespace ef
