#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ef/rng.hpp"

namespace ef {

/// Dense H x W x C grid of intensities in [0,1], stored planar:
/// data[(c*H + y)*W + x]. C is 1 (grayscale) or 3 (RGB).
///
/// The same container also carries image-shaped gradients, which are not
/// bound by the [0,1] range; operations that require valid intensities check
/// them at their boundary.
struct Image {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<double> data;

  Image() = default;
  Image(int h, int w, int c, double fill = 0.0)
      : height(h), width(w), channels(c),
        data(static_cast<std::size_t>(h) * w * c, fill) {
    if (h < 1 || w < 1 || (c != 1 && c != 3))
      throw std::invalid_argument("Image: bad dimensions");
  }

  std::size_t pixel_count() const { return static_cast<std::size_t>(height) * width; }
  std::size_t size() const { return data.size(); }

  double* plane(int c) { return data.data() + static_cast<std::size_t>(c) * pixel_count(); }
  const double* plane(int c) const {
    return data.data() + static_cast<std::size_t>(c) * pixel_count();
  }

  double& at(int c, int y, int x) {
    return data[(static_cast<std::size_t>(c) * height + y) * width + x];
  }
  double at(int c, int y, int x) const {
    return data[(static_cast<std::size_t>(c) * height + y) * width + x];
  }

  bool same_shape(const Image& o) const {
    return height == o.height && width == o.width && channels == o.channels;
  }
};

/// Throws std::invalid_argument unless every intensity is in [0,1] and the
/// buffer length matches the dimensions.
void require_valid_intensities(const Image& img, const char* where);

/// Error for malformed PPM/PGM input; carries the byte offset of the problem.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& msg, std::size_t byte_offset);
  std::size_t byte_offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Reads a binary P6 (RGB) or P5 (grayscale) file with maxval 255.
/// Intensities are byte/255.
Image load_ppm(const std::string& path);

/// Writes P6 for 3-channel images, P5 for grayscale. Each intensity is
/// quantized by round-half-away-from-zero of v*255.
void save_ppm(const Image& img, const std::string& path);

/// Reflect-101 padding: the border mirrors without repeating the edge pixel
/// (... b a | a b c | c b ...  ->  b | a b c | b). Requires
/// margin <= min(height,width) - 1.
Image pad_reflect101(const Image& img, int margin);

/// Reflect-101 index mapping for a coordinate q in [-(n-1), 2n-2].
inline int reflect101(int q, int n) {
  if (q < 0) return -q;
  if (q >= n) return 2 * (n - 1) - q;
  return q;
}

/// Area-weighted downscale (upscaling is out of scope). Each output pixel is
/// the average of the source pixels its footprint covers; exact box averaging
/// for integer scale factors.
Image area_resize(const Image& img, int out_h, int out_w);

/// Mirrors columns: j -> width-1-j in every channel.
Image horizontal_flip(const Image& img);

/// Pads by `pad` on each side, then crops back to the original size at an
/// offset drawn uniformly from [0, 2*pad]^2 (dy first, then dx). The default
/// padding is zero fill; reflect_fill switches to reflect-101 borders.
Image pad_and_random_crop(const Image& img, int pad, Rng& rng,
                          bool reflect_fill = false);

}  // namespace ef
