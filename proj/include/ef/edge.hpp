#pragma once

#include "ef/image.hpp"

namespace ef {

/// Edge responses share the Image container: same planar layout, same shape
/// as the source image, values in [0,1].
using EdgeMap = Image;

/// Per-channel normalized Sobel gradient magnitude. gx/gy come from
/// cross-correlation with the standard 3x3 kernels
///   Kx = [[-1,0,1],[-2,0,2],[-1,0,1]],  Ky = Kx^T
/// under reflect-101 borders; the response is sqrt(gx^2+gy^2)/(4*sqrt(2)).
/// The divisor comes from the componentwise bound |gx|,|gy| <= 4 on [0,1]
/// inputs, so responses always land in [0,1] (it is 1442.5/255 when
/// intensities are expressed in [0,255]).
EdgeMap sobel_response(const Image& image);

/// Arithmetic mean of sobel_response over all pixels and channels.
double mean_sobel_response(const Image& image);

/// Gradient of mean_sobel_response with respect to the image, derived through
/// the two Sobel correlations; where the magnitude is zero the derivative is
/// taken as zero (subgradient choice).
Image mean_sobel_response_gradient(const Image& image);

}  // namespace ef
