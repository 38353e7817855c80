#pragma once

#include <cstdint>
#include <vector>

#include "ef/edge.hpp"
#include "ef/image.hpp"

namespace ef {

/// Symmetric 1-D Gaussian tap weights; weights sum to 1 within 1e-12.
struct Kernel1D {
  int size = 1;
  std::vector<double> weights{1.0};
};

/// The allowed blur kernel sizes plus the edge-response cutoffs that switch
/// between them. sizes strictly increasing odd; |thresholds| = |sizes|-1,
/// strictly increasing, each in [0,1].
struct BlurLadder {
  std::vector<int> sizes;
  std::vector<double> thresholds;

  /// Throws std::invalid_argument if the invariants above are violated.
  void validate() const;
};

/// Which kernel size the threshold rule chose, per pixel per channel.
/// Planar layout identical to Image.
struct KernelSelectionMap {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<std::int32_t> sizes;

  KernelSelectionMap() = default;
  KernelSelectionMap(int h, int w, int c)
      : height(h), width(w), channels(c),
        sizes(static_cast<std::size_t>(h) * w * c, 0) {}

  std::size_t pixel_count() const {
    return static_cast<std::size_t>(height) * width;
  }
  std::int32_t* plane(int c) {
    return sizes.data() + static_cast<std::size_t>(c) * pixel_count();
  }
  const std::int32_t* plane(int c) const {
    return sizes.data() + static_cast<std::size_t>(c) * pixel_count();
  }
  std::int32_t& at(int c, int y, int x) {
    return sizes[(static_cast<std::size_t>(c) * height + y) * width + x];
  }
  std::int32_t at(int c, int y, int x) const {
    return sizes[(static_cast<std::size_t>(c) * height + y) * width + x];
  }
};

/// Gaussian taps for an odd size with sigma = 0.3*((size-1)*0.5 - 1) + 0.8,
/// sampled as exp(-(i-c)^2/(2*sigma^2)) and normalized to sum 1. Size 1 is
/// the identity kernel [1.0].
Kernel1D make_gaussian_kernel(int size);

/// Separable Gaussian blur with reflect-101 borders; size 1 returns the
/// image unchanged. Requires size/2 <= min(height,width)-1.
Image gaussian_blur(const Image& image, int size);

/// The fixed size-3 Gaussian smoothing applied to edge maps before
/// thresholding.
EdgeMap blur_edge_map(const EdgeMap& edges);

/// Threshold rule: per pixel per channel, count how many cutoffs the blurred
/// response strictly exceeds; each cutoff met moves one kernel size smaller,
/// starting from the largest. invert_ladder flips the direction (strong edges
/// get the LARGEST kernel) for fidelity experiments. pooled selects from the
/// channel-max response instead of each channel's own response, yielding
/// identical per-channel selections.
KernelSelectionMap select_kernels(const EdgeMap& blurred_edges,
                                  const BlurLadder& ladder,
                                  bool invert_ladder = false,
                                  bool pooled = false);

/// Blurs the image once per ladder size and assembles the output by copying,
/// per pixel per channel, the value from the blurred image matching the
/// selected kernel.
Image adaptive_blur(const Image& image, const KernelSelectionMap& selection,
                    const BlurLadder& ladder);

/// Exact adjoint of adaptive_blur's linear map (selection held fixed):
/// sum over ladder sizes s of blur_adjoint(upstream masked to the pixels that
/// selected s, s). The blur adjoint is the scatter-back transpose of the
/// reflect-101 padded convolution, not a second blur.
Image adaptive_blur_vjp(const Image& upstream,
                        const KernelSelectionMap& selection,
                        const BlurLadder& ladder);

/// Generic separable cross-correlation with reflect-101 borders and per-axis
/// odd kernels (row kernel applied along x, column kernel along y), plus its
/// exact adjoint. gaussian_blur and the Sobel-term gradient are built on
/// these.
Image conv_separable(const Image& image, const std::vector<double>& row_k,
                     const std::vector<double>& col_k);
Image conv_separable_adjoint(const Image& upstream,
                             const std::vector<double>& row_k,
                             const std::vector<double>& col_k);

}  // namespace ef
