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

#ifndef PFORGE_IMAGE_CODEC_HPP
#define PFORGE_IMAGE_CODEC_HPP

#include <cstdint>
#include <filesystem>
#include <vector>

#include "pforge/types.hpp"

namespace pforge::io {

/// 8-bit interleaved RGB buffer, row-major.
struct Rgb8Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // size == width * height * 3
};

/// 16-bit single-channel buffer, row-major.  Used for quantized depth.
struct Gray16Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> pixels;  // size == width * height
};

std::vector<std::uint8_t> encode_png(const Rgb8Image& image);
std::vector<std::uint8_t> encode_png(const Gray16Image& image);

/// Decodes a PNG into 8-bit RGB, expanding palette or gray images and
/// stripping alpha.  Throws DecodeError on malformed input.
Rgb8Image decode_png_rgb8(const std::vector<std::uint8_t>& bytes);

/// Decodes a PNG that must be 16-bit grayscale.  Throws DecodeError otherwise.
Gray16Image decode_png_gray16(const std::vector<std::uint8_t>& bytes);

/// Baseline JPEG round trip.  Quality in [1, 100].
std::vector<std::uint8_t> encode_jpeg(const Rgb8Image& image, int quality);
Rgb8Image decode_jpeg_rgb8(const std::vector<std::uint8_t>& bytes);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path,
                const std::vector<std::uint8_t>& bytes);

/// Float [0,1] <-> 8-bit conversions.  Quantization rounds half away from
/// zero after clamping, so 1.0f maps to 255 and values survive a round trip
/// through an 8-bit file within half a step.
std::uint8_t quantize_unit_to_u8(float v);
inline float u8_to_unit(std::uint8_t v) {
  return static_cast<float>(v) / 255.0f;
}

Rgb8Image to_rgb8(const RgbFrame& frame);
RgbFrame to_rgb_frame(const Rgb8Image& image, double timestamp);

/// Depth <-> 16-bit quantization with a fixed scale (value = meters * scale).
/// VOID maps to raw 0 and back.  Readings beyond the representable range are
/// written as VOID; the caller can count those through the optional
/// out-parameter.
Gray16Image quantize_depth(const DepthFrame& frame, double scale,
                           std::size_t* saturated = nullptr);
DepthFrame dequantize_depth(const Gray16Image& image, double scale,
                            double timestamp);

}  // namespace pforge::io

#endif  // PFORGE_IMAGE_CODEC_HPP
