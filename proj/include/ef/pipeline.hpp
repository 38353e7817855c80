#pragma once

#include <string>

#include "ef/blur.hpp"
#include "ef/quant.hpp"

namespace ef {

/// Full hyperparameter record for the Essential Features transform.
struct EFConfig {
  BlurLadder ladder;
  KMeansConfig kmeans;
  bool emit_intermediates = false;
  bool invert_ladder = false;    // strong edges -> largest kernel (experiment)
  bool pooled_selection = false; // select from the channel-max edge response

  void validate() const;
};

/// Transform output plus (when emit_intermediates) the stage artifacts
/// attacks and the CLI need: the raw Sobel response, the kernel selection
/// map, and the fitted palette.
struct EFResult {
  Image output;
  KernelSelectionMap selection;
  Palette palette;
  EdgeMap edge_map;
};

/// Named hyperparameter sets:
///   cifar10  -> sizes [1,3,5],  thresholds [15/255, 55/255], k = 32
///   resisc45 -> sizes [3,7,13], thresholds [25/255, 55/255], k = 16
/// both with 20 k-means iterations and a 32x32 thumbnail.
EFConfig preset(const std::string& name);

/// Sobel response -> size-3 edge smoothing -> threshold selection ->
/// adaptive blur -> k-means palette on the *blurred* image -> palette
/// reassignment. rng is consumed only by the k-means initialization, so the
/// result is bit-identical to calling the six stages manually with the same
/// rng state.
EFResult essential_features(const Image& image, const EFConfig& cfg, Rng& rng);

/// Convenience overload seeding the rng from cfg.kmeans.seed.
EFResult essential_features(const Image& image, const EFConfig& cfg);

}  // namespace ef
