#pragma once

// Helpers shared by the unit suites: small image builders, bitwise
// comparison, and a scratch directory per test process.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "ef/image.hpp"
#include "ef/rng.hpp"

namespace test_support {

// Row-major grayscale image from an initializer-friendly vector.
inline ef::Image gray_image(int h, int w, const std::vector<double>& vals) {
  ef::Image img(h, w, 1);
  img.data = vals;
  return img;
}

// Random RGB image with intensities in [lo, hi] (defaults stay clear of the
// clamp boundaries so finite-difference probes cannot leave [0,1]).
inline ef::Image random_image(int h, int w, int c, ef::Rng& rng,
                              double lo = 0.05, double hi = 0.95) {
  ef::Image img(h, w, c);
  for (auto& v : img.data) v = rng.uniform(lo, hi);
  return img;
}

// True when the two images agree bit for bit (shape and every double).
inline bool bitwise_equal(const ef::Image& a, const ef::Image& b) {
  if (!a.same_shape(b)) return false;
  for (std::size_t i = 0; i < a.data.size(); ++i)
    if (a.data[i] != b.data[i]) return false;
  return true;
}

// Largest absolute element difference; requires equal shapes.
inline double max_abs_diff(const ef::Image& a, const ef::Image& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i)
    m = std::max(m, std::fabs(a.data[i] - b.data[i]));
  return m;
}

// Fresh scratch directory under the system temp root.
inline std::string scratch_dir(const char* tag) {
  auto dir = std::filesystem::temp_directory_path() /
             (std::string("ef_test_") + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

}  // namespace test_support
