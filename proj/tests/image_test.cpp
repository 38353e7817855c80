#include <cmath>
#include <fstream>
#include <set>
#include <string>

#include "doctest.h"
#include "ef/image.hpp"
#include "support.hpp"

using ef::FormatError;
using ef::Image;
using ef::Rng;
using namespace test_support;

namespace {

std::string write_file(const std::string& dir, const char* name,
                       const std::string& bytes) {
  const std::string path = dir + "/" + name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  return path;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("Image construction and planar accessors") {
  Image img(2, 3, 3, 0.5);
  CHECK(img.pixel_count() == 6);
  CHECK(img.size() == 18);
  img.at(2, 1, 0) = 0.25;
  // Planar layout: channel 2 starts at offset 2*6, row 1 col 0 is +3.
  CHECK(img.data[2 * 6 + 3] == 0.25);
  CHECK(img.plane(2)[3] == 0.25);

  CHECK_THROWS_AS(Image(0, 1, 3), std::invalid_argument);
  CHECK_THROWS_AS(Image(1, 1, 2), std::invalid_argument);
}

TEST_CASE("require_valid_intensities rejects bad buffers and ranges") {
  Image img(2, 2, 1, 0.5);
  CHECK_NOTHROW(ef::require_valid_intensities(img, "test"));
  img.data[1] = 1.5;
  CHECK_THROWS_AS(ef::require_valid_intensities(img, "test"),
                  std::invalid_argument);
  img.data[1] = std::nan("");
  CHECK_THROWS_AS(ef::require_valid_intensities(img, "test"),
                  std::invalid_argument);
  img.data[1] = 0.5;
  img.data.pop_back();
  CHECK_THROWS_AS(ef::require_valid_intensities(img, "test"),
                  std::invalid_argument);
}

TEST_CASE("PGM round trip covers every byte value exactly") {
  const std::string dir = scratch_dir("pgm_roundtrip");
  Image img(16, 16, 1);
  for (int i = 0; i < 256; ++i) img.data[static_cast<std::size_t>(i)] = i / 255.0;

  const std::string path = dir + "/all_bytes.pgm";
  ef::save_ppm(img, path);
  const Image back = ef::load_ppm(path);
  CHECK(back.channels == 1);
  CHECK(bitwise_equal(img, back));

  // Saving the loaded image reproduces the file byte for byte.
  const std::string path2 = dir + "/all_bytes2.pgm";
  ef::save_ppm(back, path2);
  CHECK(read_file(path) == read_file(path2));
}

TEST_CASE("PPM round trip quantizes within half a byte step") {
  const std::string dir = scratch_dir("ppm_roundtrip");
  Rng rng(3);
  const Image img = random_image(7, 5, 3, rng, 0.0, 1.0);
  const std::string path = dir + "/rand.ppm";
  ef::save_ppm(img, path);
  const Image back = ef::load_ppm(path);
  CHECK(back.height == 7);
  CHECK(back.width == 5);
  CHECK(back.channels == 3);
  CHECK(max_abs_diff(img, back) <= 0.5 / 255.0 + 1e-15);
}

TEST_CASE("save_ppm rounds half away from zero") {
  const std::string dir = scratch_dir("ppm_round");
  Image img(1, 3, 1);
  img.data = {0.5, 127.0 / 255.0, 127.49 / 255.0};
  const std::string path = dir + "/round.pgm";
  ef::save_ppm(img, path);
  const std::string bytes = read_file(path);
  // Header "P5\n3 1\n255\n" is 11 bytes; payload follows.
  REQUIRE(bytes.size() == 11 + 3);
  CHECK(static_cast<unsigned char>(bytes[11]) == 128);  // 127.5 rounds up
  CHECK(static_cast<unsigned char>(bytes[12]) == 127);
  CHECK(static_cast<unsigned char>(bytes[13]) == 127);
}

TEST_CASE("load_ppm accepts comments and mixed whitespace in the header") {
  const std::string dir = scratch_dir("ppm_header");
  const std::string path = write_file(
      dir, "commented.ppm",
      std::string("P6 # trailing comment\n# full line\n 2\t1 \r\n255\n") +
          std::string("\x01\x02\x03\x04\x05\x06", 6));
  const Image img = ef::load_ppm(path);
  CHECK(img.width == 2);
  CHECK(img.height == 1);
  CHECK(img.at(0, 0, 0) == 1.0 / 255.0);
  CHECK(img.at(2, 0, 1) == 6.0 / 255.0);
}

TEST_CASE("load_ppm reports the byte offset of each malformation") {
  const std::string dir = scratch_dir("ppm_errors");

  SUBCASE("wrong magic") {
    const auto path = write_file(dir, "bad.ppm", "P4\n1 1\n255\nX");
    try {
      ef::load_ppm(path);
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(e.byte_offset() == 0);
    }
  }

  SUBCASE("unsupported maxval points at the maxval field") {
    const auto path = write_file(dir, "maxval.pgm", "P5\n2 2\n127\nXXXX");
    try {
      ef::load_ppm(path);
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      // Offset 6 is the separator right before "127", where header parsing
      // stood when it started reading the field.
      CHECK(e.byte_offset() == 6);
      CHECK(std::string(e.what()).find("127") != std::string::npos);
    }
  }

  SUBCASE("truncated pixel data points at end of file") {
    const std::string content = "P6\n2 2\n255\nshort";
    const auto path = write_file(dir, "trunc.ppm", content);
    try {
      ef::load_ppm(path);
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(e.byte_offset() == content.size());
    }
  }

  SUBCASE("missing height") {
    const auto path = write_file(dir, "noheight.pgm", "P5\n2 ");
    CHECK_THROWS_AS(ef::load_ppm(path), FormatError);
  }

  SUBCASE("nonexistent file") {
    CHECK_THROWS_AS(ef::load_ppm(dir + "/missing.ppm"), std::runtime_error);
  }
}

TEST_CASE("save_ppm rejects out-of-range intensities") {
  const std::string dir = scratch_dir("ppm_reject");
  Image img(1, 1, 1);
  img.data = {1.25};
  CHECK_THROWS_AS(ef::save_ppm(img, dir + "/bad.pgm"), std::invalid_argument);
}

TEST_CASE("reflect101 mirrors without repeating the edge sample") {
  // n = 4: positions -3..-1 map to 3,2,1 and 4..6 map to 2,1,0.
  CHECK(ef::reflect101(-1, 4) == 1);
  CHECK(ef::reflect101(-3, 4) == 3);
  CHECK(ef::reflect101(0, 4) == 0);
  CHECK(ef::reflect101(3, 4) == 3);
  CHECK(ef::reflect101(4, 4) == 2);
  CHECK(ef::reflect101(6, 4) == 0);
}

TEST_CASE("pad_reflect101 produces the c b a b c b a border pattern") {
  Image img = gray_image(3, 3, {0.1, 0.2, 0.3,   //
                                0.4, 0.5, 0.6,   //
                                0.7, 0.8, 0.9});
  const Image out = ef::pad_reflect101(img, 2);
  REQUIRE(out.height == 7);
  REQUIRE(out.width == 7);
  // The row aligned with source row 0 reads c b | a b c | b a.
  const double expect[] = {0.3, 0.2, 0.1, 0.2, 0.3, 0.2, 0.1};
  for (int x = 0; x < 7; ++x) CHECK(out.at(0, 2, x) == expect[x]);
  // Corner: (-2,-2) reflects to (2,2).
  CHECK(out.at(0, 0, 0) == img.at(0, 2, 2));

  CHECK_THROWS_AS(ef::pad_reflect101(img, 3), std::invalid_argument);
  CHECK_THROWS_AS(ef::pad_reflect101(img, -1), std::invalid_argument);
}

TEST_CASE("area_resize averages integer boxes exactly") {
  Image img = gray_image(4, 4, {0.0, 0.1, 0.2, 0.3,   //
                                0.4, 0.5, 0.6, 0.7,   //
                                0.8, 0.9, 1.0, 0.1,   //
                                0.2, 0.3, 0.4, 0.5});
  const Image out = ef::area_resize(img, 2, 2);
  CHECK(out.at(0, 0, 0) == doctest::Approx((0.0 + 0.1 + 0.4 + 0.5) / 4).epsilon(1e-15));
  CHECK(out.at(0, 0, 1) == doctest::Approx((0.2 + 0.3 + 0.6 + 0.7) / 4).epsilon(1e-15));
  CHECK(out.at(0, 1, 0) == doctest::Approx((0.8 + 0.9 + 0.2 + 0.3) / 4).epsilon(1e-15));
  CHECK(out.at(0, 1, 1) == doctest::Approx((1.0 + 0.1 + 0.4 + 0.5) / 4).epsilon(1e-15));
}

TEST_CASE("area_resize splits fractional footprints by overlap") {
  // 3 -> 2 on one axis: output 0 covers [0, 1.5) -> (v0*1 + v1*0.5)/1.5.
  Image img = gray_image(1, 3, {0.0, 0.3, 0.9});
  const Image out = ef::area_resize(img, 1, 2);
  CHECK(out.at(0, 0, 0) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(out.at(0, 0, 1) == doctest::Approx(0.7).epsilon(1e-14));
}

TEST_CASE("area_resize validates its arguments") {
  Image img(4, 4, 1, 0.5);
  CHECK_THROWS_AS(ef::area_resize(img, 5, 4), std::invalid_argument);
  CHECK_THROWS_AS(ef::area_resize(img, 0, 2), std::invalid_argument);
  // Identity resize returns the image unchanged.
  CHECK(bitwise_equal(ef::area_resize(img, 4, 4), img));
}

TEST_CASE("horizontal_flip mirrors columns and is an involution") {
  Rng rng(5);
  const Image img = random_image(6, 9, 3, rng);
  const Image flipped = ef::horizontal_flip(img);
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < 6; ++y)
      for (int x = 0; x < 9; ++x)
        CHECK(flipped.at(c, y, x) == img.at(c, y, 8 - x));
  CHECK(bitwise_equal(ef::horizontal_flip(flipped), img));
}

TEST_CASE("pad_and_random_crop with pad 0 is the identity") {
  Rng rng(8);
  const Image img = random_image(5, 5, 3, rng);
  Rng crop_rng(1);
  CHECK(bitwise_equal(ef::pad_and_random_crop(img, 0, crop_rng), img));
}

TEST_CASE("pad_and_random_crop zero fill matches an explicit shift") {
  Rng rng(17);
  const Image img = random_image(8, 8, 3, rng);
  const int pad = 2;

  Rng crop_rng(901);
  const Image out = ef::pad_and_random_crop(img, pad, crop_rng);

  // Replay the offset draws: dy first, then dx, each from [0, 2*pad].
  Rng replay(901);
  const int dy = static_cast<int>(replay.below(2 * pad + 1));
  const int dx = static_cast<int>(replay.below(2 * pad + 1));
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < 8; ++y)
      for (int x = 0; x < 8; ++x) {
        const int sy = y + dy - pad;
        const int sx = x + dx - pad;
        const bool inside = sy >= 0 && sy < 8 && sx >= 0 && sx < 8;
        CHECK(out.at(c, y, x) == (inside ? img.at(c, sy, sx) : 0.0));
      }
}

TEST_CASE("pad_and_random_crop reflect fill matches pad_reflect101 plus crop") {
  Rng rng(18);
  const Image img = random_image(8, 8, 3, rng);
  const int pad = 3;

  Rng crop_rng(77);
  const Image out = ef::pad_and_random_crop(img, pad, crop_rng, true);

  Rng replay(77);
  const int dy = static_cast<int>(replay.below(2 * pad + 1));
  const int dx = static_cast<int>(replay.below(2 * pad + 1));
  const Image padded = ef::pad_reflect101(img, pad);
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < 8; ++y)
      for (int x = 0; x < 8; ++x)
        CHECK(out.at(c, y, x) == padded.at(c, y + dy, x + dx));
}

TEST_CASE("pad_and_random_crop offsets cover the full range") {
  Image img(4, 4, 1, 0.0);
  img.at(0, 1, 1) = 1.0;  // tracer pixel away from the border
  std::set<std::pair<int, int>> positions;
  Rng rng(4242);
  for (int trial = 0; trial < 200; ++trial) {
    const Image out = ef::pad_and_random_crop(img, 1, rng);
    for (int y = 0; y < 4; ++y)
      for (int x = 0; x < 4; ++x)
        if (out.at(0, y, x) == 1.0) positions.insert({y, x});
  }
  // pad 1 lets the tracer land anywhere in {0,1,2} x {0,1,2}.
  CHECK(positions.size() == 9);
}

TEST_CASE("pad_and_random_crop validates reflect margins") {
  Image img(3, 3, 1, 0.5);
  Rng rng(1);
  CHECK_THROWS_AS(ef::pad_and_random_crop(img, 3, rng, true),
                  std::invalid_argument);
  CHECK_NOTHROW(ef::pad_and_random_crop(img, 3, rng, false));
  CHECK_THROWS_AS(ef::pad_and_random_crop(img, -1, rng), std::invalid_argument);
}
