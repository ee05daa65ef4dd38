/* Copyright 2026 The perturb-forge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "pforge/image_codec.hpp"

#include <doctest.h>

#include <cmath>

#include "pforge/rng.hpp"

using namespace pforge;
using namespace pforge::io;

namespace {

Rgb8Image random_rgb8(int w, int h, std::uint64_t seed) {
  Rgb8Image image;
  image.width = w;
  image.height = h;
  image.pixels.resize(static_cast<std::size_t>(w) * h * 3);
  RngStream rng(seed);
  for (auto& v : image.pixels) {
    v = static_cast<std::uint8_t>(rng.uniform_below(256));
  }
  return image;
}

}  // namespace

TEST_CASE("png rgb8 encode/decode round-trips bitwise") {
  const Rgb8Image image = random_rgb8(37, 23, 5);
  const Rgb8Image back = decode_png_rgb8(encode_png(image));
  CHECK(back.width == image.width);
  CHECK(back.height == image.height);
  CHECK(back.pixels == image.pixels);
}

TEST_CASE("png gray16 encode/decode round-trips bitwise") {
  Gray16Image image;
  image.width = 19;
  image.height = 11;
  image.pixels.resize(static_cast<std::size_t>(19) * 11);
  RngStream rng(6);
  for (auto& v : image.pixels) {
    v = static_cast<std::uint16_t>(rng.uniform_below(65536));
  }
  image.pixels[0] = 0;
  image.pixels[1] = 65535;
  image.pixels[2] = 1;

  const Gray16Image back = decode_png_gray16(encode_png(image));
  CHECK(back.width == image.width);
  CHECK(back.height == image.height);
  CHECK(back.pixels == image.pixels);
}

TEST_CASE("png decoding rejects malformed bytes and wrong formats") {
  CHECK_THROWS_AS(decode_png_rgb8({0x01, 0x02, 0x03}), DecodeError);
  CHECK_THROWS_AS(decode_png_gray16({}), DecodeError);
  // An RGB png is not a depth png.
  const auto rgb_bytes = encode_png(random_rgb8(4, 4, 7));
  CHECK_THROWS_AS(decode_png_gray16(rgb_bytes), DecodeError);
}

TEST_CASE("jpeg encoding is deterministic and lossy in the expected way") {
  const Rgb8Image image = random_rgb8(64, 48, 8);
  const auto bytes_a = encode_jpeg(image, 25);
  const auto bytes_b = encode_jpeg(image, 25);
  CHECK(bytes_a == bytes_b);

  const Rgb8Image back = decode_jpeg_rgb8(bytes_a);
  CHECK(back.width == image.width);
  CHECK(back.height == image.height);
  CHECK(back.pixels != image.pixels);  // random noise cannot survive q25

  // Harsher quality compresses a noisy image into fewer bytes.
  const auto small = encode_jpeg(image, 10);
  const auto large = encode_jpeg(image, 90);
  CHECK(small.size() < bytes_a.size());
  CHECK(bytes_a.size() < large.size());

  CHECK_THROWS_AS(encode_jpeg(image, 0), InvalidParameter);
  CHECK_THROWS_AS(encode_jpeg(image, 101), InvalidParameter);
  CHECK_THROWS_AS(decode_jpeg_rgb8({0xff, 0x00}), DecodeError);
}

TEST_CASE("unit-float quantization rounds half away from zero") {
  CHECK(quantize_unit_to_u8(0.0f) == 0);
  CHECK(quantize_unit_to_u8(1.0f) == 255);
  CHECK(quantize_unit_to_u8(1.5f) == 255);   // clamped
  CHECK(quantize_unit_to_u8(-0.25f) == 0);   // clamped
  CHECK(quantize_unit_to_u8(0.5f) == 128);   // 127.5 rounds away from zero
  for (int i = 0; i <= 255; ++i) {
    const float unit = u8_to_unit(static_cast<std::uint8_t>(i));
    CHECK(quantize_unit_to_u8(unit) == i);
  }
}

TEST_CASE("depth quantization keeps VOID and voids out-of-range readings") {
  DepthFrame frame(0.5, 3, 2);
  frame.depths = {DepthFrame::kVoid, 1.0f, 0.00005f, 14.0f, 13.2f, 2.5f};
  std::size_t saturated = 99;
  const Gray16Image q = quantize_depth(frame, 5000.0, &saturated);
  CHECK(q.pixels[0] == 0);
  CHECK(q.pixels[1] == 5000);
  CHECK(q.pixels[2] == 1);  // sub-step readings stay measurements
  CHECK(q.pixels[3] == 0);  // 70000 exceeds 16 bits: recorded as missing
  CHECK(q.pixels[4] == 0);  // 66000 likewise
  CHECK(q.pixels[5] == 12500);
  CHECK(saturated == 2);
  // The largest representable reading itself survives.
  DepthFrame edge(0.0, 1, 1);
  edge.depths = {13.107f};  // 65535 raw at scale 5000
  std::size_t edge_clipped = 9;
  CHECK(quantize_depth(edge, 5000.0, &edge_clipped).pixels[0] == 65535);
  CHECK(edge_clipped == 0);

  const DepthFrame back = dequantize_depth(q, 5000.0, 0.5);
  CHECK(DepthFrame::is_void(back.depths[0]));
  CHECK(back.depths[1] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(back.timestamp == 0.5);

  CHECK_THROWS_AS(quantize_depth(frame, 0.0, nullptr), InvalidParameter);
}

TEST_CASE("rgb frame float conversion survives an 8-bit round trip") {
  RgbFrame frame(0.0, 8, 4);
  RngStream rng(9);
  for (float& v : frame.pixels) {
    v = static_cast<float>(rng.uniform());
  }
  const RgbFrame back = to_rgb_frame(to_rgb8(frame), frame.timestamp);
  for (std::size_t i = 0; i < frame.pixels.size(); ++i) {
    CHECK(std::abs(back.pixels[i] - frame.pixels[i]) <= 0.5f / 255.0f + 1e-6f);
  }
  // And a second trip is exact: 8-bit grid points are fixed points.
  const RgbFrame again = to_rgb_frame(to_rgb8(back), frame.timestamp);
  CHECK(again.pixels == back.pixels);
}

TEST_CASE("file helpers round-trip bytes") {
  const std::vector<std::uint8_t> payload = {0, 1, 2, 254, 255, 0, 42};
  const std::filesystem::path path = "codec_io_test.bin";
  write_file(path, payload);
  CHECK(read_file(path) == payload);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_file("does_not_exist.bin"), IoError);
}
