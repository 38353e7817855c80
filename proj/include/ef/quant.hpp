#pragma once

#include <cstdint>
#include <vector>

#include "ef/image.hpp"
#include "ef/rng.hpp"

namespace ef {

/// k RGB centroids, components in [0,1], stored interleaved (centers[3*j+c]).
struct Palette {
  int k = 0;
  std::vector<double> centers;
};

struct KMeansConfig {
  int k = 16;
  int iterations = 20;
  int thumb_side = 32;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Fast k-means: clusters an area-resized thumbnail (at most thumb_side on
/// each axis; never upscaled), initializing centers from k distinct thumbnail
/// pixels drawn with rng, then exactly cfg.iterations Lloyd steps. Ties in
/// the assignment go to the lowest center index; empty clusters keep their
/// previous center. If objective_trace is non-null it receives the mean
/// squared assignment distance recorded at each iteration's assignment step
/// (a non-increasing sequence).
Palette kmeans_palette(const Image& image, const KMeansConfig& cfg, Rng& rng,
                       std::vector<double>* objective_trace = nullptr);

/// Each pixel replaced by its nearest palette center (squared Euclidean RGB
/// distance, ties to the lowest index).
Image apply_palette(const Image& image, const Palette& palette);

/// Mean over pixels of the squared distance to the nearest center.
double reconstruction_error(const Image& image, const Palette& palette);

}  // namespace ef
