#include "ef/pipeline.hpp"

#include <stdexcept>
#include <utility>

namespace ef {

void EFConfig::validate() const {
  ladder.validate();
  kmeans.validate();
}

EFConfig preset(const std::string& name) {
  EFConfig cfg;
  if (name == "cifar10") {
    cfg.ladder.sizes = {1, 3, 5};
    cfg.ladder.thresholds = {15.0 / 255.0, 55.0 / 255.0};
    cfg.kmeans.k = 32;
  } else if (name == "resisc45") {
    cfg.ladder.sizes = {3, 7, 13};
    cfg.ladder.thresholds = {25.0 / 255.0, 55.0 / 255.0};
    cfg.kmeans.k = 16;
  } else {
    throw std::invalid_argument("preset: unknown preset \"" + name + "\"");
  }
  cfg.kmeans.iterations = 20;
  cfg.kmeans.thumb_side = 32;
  return cfg;
}

EFResult essential_features(const Image& image, const EFConfig& cfg, Rng& rng) {
  cfg.validate();
  require_valid_intensities(image, "essential_features");
  if (image.channels != 3)
    throw std::invalid_argument("essential_features: 3-channel image required");

  EdgeMap edges = sobel_response(image);
  const EdgeMap smoothed = blur_edge_map(edges);
  KernelSelectionMap selection =
      select_kernels(smoothed, cfg.ladder, cfg.invert_ladder,
                     cfg.pooled_selection);
  const Image blurred = adaptive_blur(image, selection, cfg.ladder);
  Palette palette = kmeans_palette(blurred, cfg.kmeans, rng);
  Image out = apply_palette(blurred, palette);

  EFResult res;
  res.output = std::move(out);
  if (cfg.emit_intermediates) {
    res.selection = std::move(selection);
    res.palette = std::move(palette);
    res.edge_map = std::move(edges);  // pre-smoothing response
  }
  return res;
}

EFResult essential_features(const Image& image, const EFConfig& cfg) {
  Rng rng(cfg.kmeans.seed);
  return essential_features(image, cfg, rng);
}

}  // namespace ef
