#include "ef/blur.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>

#include "ef/parallel.hpp"
#include "ef/simd/kernels.hpp"

namespace ef {

void BlurLadder::validate() const {
  if (sizes.empty())
    throw std::invalid_argument("BlurLadder: sizes must be non-empty");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 1 || sizes[i] % 2 == 0)
      throw std::invalid_argument("BlurLadder: sizes must be odd and positive");
    if (i > 0 && sizes[i] <= sizes[i - 1])
      throw std::invalid_argument("BlurLadder: sizes must be strictly increasing");
  }
  if (thresholds.size() + 1 != sizes.size())
    throw std::invalid_argument(
        "BlurLadder: need exactly |sizes|-1 thresholds");
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (!(thresholds[i] >= 0.0 && thresholds[i] <= 1.0))
      throw std::invalid_argument("BlurLadder: thresholds must lie in [0,1]");
    if (i > 0 && !(thresholds[i] > thresholds[i - 1]))
      throw std::invalid_argument(
          "BlurLadder: thresholds must be strictly increasing");
  }
}

Kernel1D make_gaussian_kernel(int size) {
  if (size < 1 || size % 2 == 0)
    throw std::invalid_argument(
        "make_gaussian_kernel: size must be odd and positive");
  Kernel1D k;
  k.size = size;
  if (size == 1) {
    k.weights = {1.0};
    return k;
  }
  const double sigma = 0.3 * ((size - 1) * 0.5 - 1.0) + 0.8;
  const double center = (size - 1) * 0.5;
  k.weights.resize(size);
  double total = 0.0;
  for (int i = 0; i < size; ++i) {
    const double d = i - center;
    k.weights[i] = std::exp(-(d * d) / (2.0 * sigma * sigma));
    total += k.weights[i];
  }
  for (int i = 0; i < size; ++i) k.weights[i] /= total;
  return k;
}

namespace {

void check_kernel(const std::vector<double>& k, const char* where) {
  if (k.empty() || k.size() % 2 == 0)
    throw std::invalid_argument(std::string(where) +
                                ": kernel must have odd positive length");
}

// Reflect-101 padding with independent vertical/horizontal margins.
Image pad_reflect101_rect(const Image& img, int my, int mx) {
  if (my > img.height - 1 || mx > img.width - 1)
    throw std::invalid_argument("conv_separable: kernel too large for image");
  Image out(img.height + 2 * my, img.width + 2 * mx, img.channels);
  for (int c = 0; c < img.channels; ++c)
    for (int y = 0; y < out.height; ++y) {
      const int sy = reflect101(y - my, img.height);
      for (int x = 0; x < out.width; ++x)
        out.at(c, y, x) = img.at(c, sy, reflect101(x - mx, img.width));
    }
  return out;
}

}  // namespace

Image conv_separable(const Image& image, const std::vector<double>& row_k,
                     const std::vector<double>& col_k) {
  check_kernel(row_k, "conv_separable(row)");
  check_kernel(col_k, "conv_separable(col)");
  const int tx = static_cast<int>(row_k.size());
  const int ty = static_cast<int>(col_k.size());
  const int mx = tx / 2;
  const int my = ty / 2;
  const int h = image.height, w = image.width;
  const Image padded = pad_reflect101_rect(image, my, mx);
  const auto& K = simd::kernels();

  Image out(h, w, image.channels);
  std::vector<double> tmp(static_cast<std::size_t>(h + 2 * my) * w);
  for (int c = 0; c < image.channels; ++c) {
    const double* src = padded.plane(c);
    // horizontal pass over every padded row
    parallel_for(h + 2 * my, [&](int y0, int y1) {
      for (int y = y0; y < y1; ++y)
        K.conv1d_row(src + static_cast<std::size_t>(y) * padded.width,
                     tmp.data() + static_cast<std::size_t>(y) * w, w,
                     row_k.data(), tx);
    });
    // vertical pass producing the output rows
    double* dst = out.plane(c);
    parallel_for(h, [&](int y0, int y1) {
      for (int y = y0; y < y1; ++y)
        K.conv1d_col(tmp.data() + static_cast<std::size_t>(y) * w, w,
                     dst + static_cast<std::size_t>(y) * w, w, col_k.data(),
                     ty);
    });
  }
  return out;
}

Image conv_separable_adjoint(const Image& upstream,
                             const std::vector<double>& row_k,
                             const std::vector<double>& col_k) {
  check_kernel(row_k, "conv_separable_adjoint(row)");
  check_kernel(col_k, "conv_separable_adjoint(col)");
  const int tx = static_cast<int>(row_k.size());
  const int ty = static_cast<int>(col_k.size());
  const int mx = tx / 2;
  const int my = ty / 2;
  const int h = upstream.height, w = upstream.width;
  if (my > h - 1 || mx > w - 1)
    throw std::invalid_argument(
        "conv_separable_adjoint: kernel too large for image");

  // The forward map is pad -> row correlation -> column correlation; its
  // transpose runs the corresponding adjoints in reverse order. The adjoint
  // of a valid correlation is a full correlation with the reversed kernel
  // (realized below by zero-extending and reusing the forward kernels), and
  // the adjoint of reflect-101 padding folds each padded cell back onto the
  // source cell it mirrored.
  std::vector<double> row_rev(row_k.rbegin(), row_k.rend());
  std::vector<double> col_rev(col_k.rbegin(), col_k.rend());
  const auto& K = simd::kernels();

  Image out(h, w, upstream.channels);
  const int gt_h = h + 2 * my;           // rows of the column-pass adjoint
  const int gp_w = w + 2 * mx;           // columns of the row-pass adjoint
  const int ext_h = h + 2 * (ty - 1);    // zero-extended upstream height
  const int ext_w = w + 2 * (tx - 1);    // zero-extended row width
  std::vector<double> uext(static_cast<std::size_t>(ext_h) * w);
  std::vector<double> gt(static_cast<std::size_t>(gt_h) * w);
  std::vector<double> gtext(static_cast<std::size_t>(gt_h) * ext_w);
  std::vector<double> gp(static_cast<std::size_t>(gt_h) * gp_w);

  for (int c = 0; c < upstream.channels; ++c) {
    // adjoint of the vertical pass: gt(q,x) = sum_u col_rev[u]*uext(q+u,x)
    std::fill(uext.begin(), uext.end(), 0.0);
    std::memcpy(uext.data() + static_cast<std::size_t>(ty - 1) * w,
                upstream.plane(c), sizeof(double) * h * w);
    parallel_for(gt_h, [&](int q0, int q1) {
      for (int q = q0; q < q1; ++q)
        K.conv1d_col(uext.data() + static_cast<std::size_t>(q) * w, w,
                     gt.data() + static_cast<std::size_t>(q) * w, w,
                     col_rev.data(), ty);
    });
    // adjoint of the horizontal pass, along each gt row
    std::fill(gtext.begin(), gtext.end(), 0.0);
    for (int q = 0; q < gt_h; ++q)
      std::memcpy(gtext.data() + static_cast<std::size_t>(q) * ext_w + (tx - 1),
                  gt.data() + static_cast<std::size_t>(q) * w,
                  sizeof(double) * w);
    parallel_for(gt_h, [&](int q0, int q1) {
      for (int q = q0; q < q1; ++q)
        K.conv1d_row(gtext.data() + static_cast<std::size_t>(q) * ext_w,
                     gp.data() + static_cast<std::size_t>(q) * gp_w, gp_w,
                     row_rev.data(), tx);
    });
    // adjoint of reflect-101 padding: deterministic sequential scatter
    double* dst = out.plane(c);
    for (int y = 0; y < gt_h; ++y) {
      const int sy = reflect101(y - my, h);
      const double* gp_row = gp.data() + static_cast<std::size_t>(y) * gp_w;
      for (int x = 0; x < gp_w; ++x)
        dst[static_cast<std::size_t>(sy) * w + reflect101(x - mx, w)] +=
            gp_row[x];
    }
  }
  return out;
}

Image gaussian_blur(const Image& image, int size) {
  const Kernel1D k = make_gaussian_kernel(size);
  if (size == 1) return image;
  return conv_separable(image, k.weights, k.weights);
}

EdgeMap blur_edge_map(const EdgeMap& edges) { return gaussian_blur(edges, 3); }

KernelSelectionMap select_kernels(const EdgeMap& blurred_edges,
                                  const BlurLadder& ladder, bool invert_ladder,
                                  bool pooled) {
  ladder.validate();
  const int h = blurred_edges.height, w = blurred_edges.width;
  const int ch = blurred_edges.channels;
  if (h < 1 || w < 1 ||
      blurred_edges.data.size() != static_cast<std::size_t>(h) * w * ch)
    throw std::invalid_argument("select_kernels: malformed edge map");
  const int n_sizes = static_cast<int>(ladder.sizes.size());
  const std::size_t plane_px = static_cast<std::size_t>(h) * w;

  // Optional cross-channel pooling: every channel selects from the
  // channel-max response instead of its own.
  std::vector<double> pooled_plane;
  if (pooled) {
    pooled_plane.assign(blurred_edges.plane(0),
                        blurred_edges.plane(0) + plane_px);
    for (int c = 1; c < ch; ++c) {
      const double* p = blurred_edges.plane(c);
      for (std::size_t i = 0; i < plane_px; ++i)
        if (p[i] > pooled_plane[i]) pooled_plane[i] = p[i];
    }
  }

  KernelSelectionMap sel(h, w, ch);
  for (int c = 0; c < ch; ++c) {
    const double* resp = pooled ? pooled_plane.data() : blurred_edges.plane(c);
    std::int32_t* dst = sel.plane(c);
    parallel_for(static_cast<int>(plane_px), [&](int i0, int i1) {
      for (int i = i0; i < i1; ++i) {
        int exceeded = 0;
        for (double t : ladder.thresholds)
          if (resp[i] > t) ++exceeded;  // strict: equal-to-threshold stays put
        const int idx = invert_ladder ? exceeded : n_sizes - 1 - exceeded;
        dst[i] = ladder.sizes[static_cast<std::size_t>(idx)];
      }
    });
  }
  return sel;
}

namespace {

void check_selection(const Image& image, const KernelSelectionMap& selection,
                     const BlurLadder& ladder, const char* where) {
  ladder.validate();
  if (selection.height != image.height || selection.width != image.width ||
      selection.channels != image.channels)
    throw std::invalid_argument(std::string(where) +
                                ": selection shape mismatch");
  for (std::int32_t s : selection.sizes) {
    bool known = false;
    for (int ls : ladder.sizes) known = known || (s == ls);
    if (!known)
      throw std::invalid_argument(std::string(where) +
                                  ": selection entry not in the ladder");
  }
}

}  // namespace

Image adaptive_blur(const Image& image, const KernelSelectionMap& selection,
                    const BlurLadder& ladder) {
  check_selection(image, selection, ladder, "adaptive_blur");
  const auto& K = simd::kernels();
  const int n = static_cast<int>(image.pixel_count());
  Image out(image.height, image.width, image.channels);
  for (int s : ladder.sizes) {
    const Image blurred = gaussian_blur(image, s);
    for (int c = 0; c < image.channels; ++c)
      K.select_merge(blurred.plane(c), selection.plane(c), s, out.plane(c), n);
  }
  return out;
}

Image adaptive_blur_vjp(const Image& upstream,
                        const KernelSelectionMap& selection,
                        const BlurLadder& ladder) {
  check_selection(upstream, selection, ladder, "adaptive_blur_vjp");
  const auto& K = simd::kernels();
  const int n = static_cast<int>(upstream.pixel_count());
  const int total = static_cast<int>(upstream.data.size());
  Image acc(upstream.height, upstream.width, upstream.channels);
  Image masked(upstream.height, upstream.width, upstream.channels);
  for (int s : ladder.sizes) {
    for (int c = 0; c < upstream.channels; ++c)
      K.select_mask(upstream.plane(c), selection.plane(c), s, masked.plane(c),
                    n);
    if (s == 1) {
      K.axpy(1.0, masked.data.data(), acc.data.data(), total);
    } else {
      const Kernel1D k = make_gaussian_kernel(s);
      const Image adj = conv_separable_adjoint(masked, k.weights, k.weights);
      K.axpy(1.0, adj.data.data(), acc.data.data(), total);
    }
  }
  return acc;
}

}  // namespace ef
