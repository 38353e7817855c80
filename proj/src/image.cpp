#include "ef/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace ef {

void require_valid_intensities(const Image& img, const char* where) {
  const std::size_t expect =
      static_cast<std::size_t>(img.height) * img.width * img.channels;
  if (img.height < 1 || img.width < 1 ||
      (img.channels != 1 && img.channels != 3) || img.data.size() != expect)
    throw std::invalid_argument(std::string(where) + ": malformed image buffer");
  for (double v : img.data)
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument(std::string(where) +
                                  ": intensity outside [0,1]");
}

FormatError::FormatError(const std::string& msg, std::size_t byte_offset)
    : std::runtime_error(msg + " (byte " + std::to_string(byte_offset) + ")"),
      offset_(byte_offset) {}

namespace {

bool is_ppm_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' ||
         c == '\f';
}

// Skips whitespace and '#' comments (which run to end of line).
void skip_separators(const std::string& buf, std::size_t& i) {
  while (i < buf.size()) {
    if (is_ppm_space(buf[i])) {
      ++i;
    } else if (buf[i] == '#') {
      while (i < buf.size() && buf[i] != '\n') ++i;
    } else {
      return;
    }
  }
}

long parse_header_int(const std::string& buf, std::size_t& i,
                      const char* what) {
  skip_separators(buf, i);
  if (i >= buf.size() || buf[i] < '0' || buf[i] > '9')
    throw FormatError(std::string("expected ") + what, i);
  const std::size_t start = i;
  long v = 0;
  while (i < buf.size() && buf[i] >= '0' && buf[i] <= '9') {
    v = v * 10 + (buf[i] - '0');
    if (v > 1000000000L)
      throw FormatError(std::string(what) + " out of range", start);
    ++i;
  }
  return v;
}

}  // namespace

Image load_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string buf((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());

  std::size_t i = 0;
  if (buf.size() < 2 || buf[0] != 'P' || (buf[1] != '5' && buf[1] != '6'))
    throw FormatError("not a binary PGM/PPM (want P5 or P6)", 0);
  const int channels = buf[1] == '6' ? 3 : 1;
  i = 2;

  const long w = parse_header_int(buf, i, "width");
  const long h = parse_header_int(buf, i, "height");
  const std::size_t maxval_at = i;
  const long maxval = parse_header_int(buf, i, "maxval");
  if (w < 1 || h < 1)
    throw FormatError("image dimensions must be positive", 2);
  if (maxval != 255)
    throw FormatError("unsupported maxval " + std::to_string(maxval),
                      maxval_at);
  if (i >= buf.size() || !is_ppm_space(buf[i]))
    throw FormatError("expected single whitespace before pixel data", i);
  ++i;  // exactly one separator byte, then raw samples

  const std::size_t need =
      static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * channels;
  if (buf.size() - i < need)
    throw FormatError("truncated pixel data", buf.size());

  Image img(static_cast<int>(h), static_cast<int>(w), channels);
  // File order is row-major with interleaved samples; the in-memory layout is
  // planar, so deinterleave here.
  for (long y = 0; y < h; ++y)
    for (long x = 0; x < w; ++x)
      for (int c = 0; c < channels; ++c) {
        const unsigned char byte =
            static_cast<unsigned char>(buf[i + (y * w + x) * channels + c]);
        img.at(c, static_cast<int>(y), static_cast<int>(x)) = byte / 255.0;
      }
  return img;
}

void save_ppm(const Image& img, const std::string& path) {
  require_valid_intensities(img, "save_ppm");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << (img.channels == 3 ? "P6" : "P5") << "\n"
      << img.width << " " << img.height << "\n255\n";
  std::string payload(img.pixel_count() * img.channels, '\0');
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      for (int c = 0; c < img.channels; ++c) {
        // round-half-away-from-zero; for v in [0,1] that is floor(v*255+0.5)
        const double scaled = img.at(c, y, x) * 255.0;
        const int q = static_cast<int>(std::floor(scaled + 0.5));
        payload[(static_cast<std::size_t>(y) * img.width + x) * img.channels +
                c] = static_cast<char>(static_cast<unsigned char>(q));
      }
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw std::runtime_error("write failed for " + path);
}

Image pad_reflect101(const Image& img, int margin) {
  if (margin < 0) throw std::invalid_argument("pad_reflect101: negative margin");
  if (margin > img.height - 1 || margin > img.width - 1)
    throw std::invalid_argument(
        "pad_reflect101: margin too large for image size");
  Image out(img.height + 2 * margin, img.width + 2 * margin, img.channels);
  for (int c = 0; c < img.channels; ++c)
    for (int y = 0; y < out.height; ++y) {
      const int sy = reflect101(y - margin, img.height);
      for (int x = 0; x < out.width; ++x)
        out.at(c, y, x) = img.at(c, sy, reflect101(x - margin, img.width));
    }
  return out;
}

namespace {

// Per-axis coverage of output cell i over source cells: half-open span
// [i*scale, (i+1)*scale) clipped against each unit source cell.
struct AxisSpan {
  int first;                    // first source index covered
  std::vector<double> weight;   // overlap length per covered source index
};

std::vector<AxisSpan> axis_spans(int n_src, int n_dst) {
  const double scale = static_cast<double>(n_src) / n_dst;
  std::vector<AxisSpan> spans(n_dst);
  for (int i = 0; i < n_dst; ++i) {
    const double lo = i * scale;
    const double hi = (i + 1) * scale;
    int first = static_cast<int>(std::floor(lo));
    int last = static_cast<int>(std::ceil(hi)) - 1;
    if (last > n_src - 1) last = n_src - 1;
    AxisSpan s;
    s.first = first;
    for (int r = first; r <= last; ++r) {
      const double w = std::min(hi, static_cast<double>(r + 1)) -
                       std::max(lo, static_cast<double>(r));
      s.weight.push_back(w);
    }
    // Degenerate trailing cell from floating-point roundoff contributes 0.
    while (!s.weight.empty() && s.weight.back() <= 0.0) s.weight.pop_back();
    spans[i] = std::move(s);
  }
  return spans;
}

}  // namespace

Image area_resize(const Image& img, int out_h, int out_w) {
  if (out_h < 1 || out_w < 1)
    throw std::invalid_argument("area_resize: output dimensions must be >= 1");
  if (out_h > img.height || out_w > img.width)
    throw std::invalid_argument("area_resize: upscaling is not supported");
  if (out_h == img.height && out_w == img.width) return img;

  const auto rows = axis_spans(img.height, out_h);
  const auto cols = axis_spans(img.width, out_w);
  Image out(out_h, out_w, img.channels);
  for (int c = 0; c < img.channels; ++c)
    for (int oy = 0; oy < out_h; ++oy)
      for (int ox = 0; ox < out_w; ++ox) {
        const AxisSpan& ry = rows[oy];
        const AxisSpan& rx = cols[ox];
        double acc = 0.0, wsum = 0.0;
        for (std::size_t a = 0; a < ry.weight.size(); ++a)
          for (std::size_t b = 0; b < rx.weight.size(); ++b) {
            const double w = ry.weight[a] * rx.weight[b];
            acc += w * img.at(c, ry.first + static_cast<int>(a),
                              rx.first + static_cast<int>(b));
            wsum += w;
          }
        out.at(c, oy, ox) = acc / wsum;
      }
  return out;
}

Image horizontal_flip(const Image& img) {
  Image out(img.height, img.width, img.channels);
  for (int c = 0; c < img.channels; ++c)
    for (int y = 0; y < img.height; ++y)
      for (int x = 0; x < img.width; ++x)
        out.at(c, y, x) = img.at(c, y, img.width - 1 - x);
  return out;
}

Image pad_and_random_crop(const Image& img, int pad, Rng& rng,
                          bool reflect_fill) {
  if (pad < 0) throw std::invalid_argument("pad_and_random_crop: negative pad");
  if (reflect_fill && pad > std::min(img.height, img.width) - 1)
    throw std::invalid_argument(
        "pad_and_random_crop: reflect fill needs pad <= min(h,w)-1");
  if (pad == 0) return img;
  const int dy = static_cast<int>(rng.below(2 * static_cast<std::uint64_t>(pad) + 1));
  const int dx = static_cast<int>(rng.below(2 * static_cast<std::uint64_t>(pad) + 1));
  Image out(img.height, img.width, img.channels);
  for (int c = 0; c < img.channels; ++c)
    for (int y = 0; y < img.height; ++y) {
      const int sy = y + dy - pad;  // coordinate in the un-padded source
      if (!reflect_fill && (sy < 0 || sy >= img.height)) continue;
      for (int x = 0; x < img.width; ++x) {
        const int sx = x + dx - pad;
        if (!reflect_fill && (sx < 0 || sx >= img.width)) continue;
        out.at(c, y, x) = reflect_fill
                              ? img.at(c, reflect101(sy, img.height),
                                       reflect101(sx, img.width))
                              : img.at(c, sy, sx);
      }
    }
  return out;
}

}  // namespace ef
