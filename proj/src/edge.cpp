#include "ef/edge.hpp"

#include "ef/blur.hpp"
#include "ef/parallel.hpp"
#include "ef/simd/kernels.hpp"

namespace ef {

namespace {

// Separable factorizations of the two 3x3 Sobel kernels (cross-correlation):
//   Kx = [1,2,1]^T (x) [-1,0,1]      Ky = [-1,0,1]^T (x) [1,2,1]
const std::vector<double> kDeriv{-1.0, 0.0, 1.0};
const std::vector<double> kSmooth{1.0, 2.0, 1.0};

}  // namespace

EdgeMap sobel_response(const Image& image) {
  require_valid_intensities(image, "sobel_response");
  const Image padded = pad_reflect101(image, 1);
  EdgeMap out(image.height, image.width, image.channels);
  const auto& K = simd::kernels();
  const int w = image.width;
  const int pw = padded.width;
  for (int c = 0; c < image.channels; ++c) {
    const double* src = padded.plane(c);
    double* dst = out.plane(c);
    parallel_for(image.height, [&](int y0, int y1) {
      for (int y = y0; y < y1; ++y)
        K.sobel_mag_row(src + static_cast<std::size_t>(y) * pw,
                        src + static_cast<std::size_t>(y + 1) * pw,
                        src + static_cast<std::size_t>(y + 2) * pw,
                        dst + static_cast<std::size_t>(y) * w, w);
    });
  }
  return out;
}

double mean_sobel_response(const Image& image) {
  const EdgeMap r = sobel_response(image);
  const auto& K = simd::kernels();
  return K.sum(r.data.data(), static_cast<int>(r.data.size())) /
         static_cast<double>(r.data.size());
}

Image mean_sobel_response_gradient(const Image& image) {
  require_valid_intensities(image, "mean_sobel_response_gradient");
  // With r = sqrt(gx^2+gy^2)/norm and mean = sum(r)/count,
  //   d mean / d gx = gx / (count * norm^2 * r),   zero where r is zero,
  // and the gx/gy fields pull back through the transposed correlations.
  const Image gx = conv_separable(image, kDeriv, kSmooth);
  const Image gy = conv_separable(image, kSmooth, kDeriv);
  const EdgeMap r = sobel_response(image);
  const double inv_count = 1.0 / static_cast<double>(image.data.size());
  const double inv_norm2 = 1.0 / (simd::kSobelNorm * simd::kSobelNorm);

  Image ugx(image.height, image.width, image.channels);
  Image ugy(image.height, image.width, image.channels);
  for (std::size_t i = 0; i < r.data.size(); ++i) {
    if (r.data[i] == 0.0) continue;  // subgradient 0 at the magnitude's kink
    const double scale = inv_count * inv_norm2 / r.data[i];
    ugx.data[i] = gx.data[i] * scale;
    ugy.data[i] = gy.data[i] * scale;
  }

  Image grad = conv_separable_adjoint(ugx, kDeriv, kSmooth);
  const Image grad_y = conv_separable_adjoint(ugy, kSmooth, kDeriv);
  const auto& K = simd::kernels();
  K.axpy(1.0, grad_y.data.data(), grad.data.data(),
         static_cast<int>(grad.data.size()));
  return grad;
}

}  // namespace ef
