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

#include <jpeglib.h>
#include <png.h>

#include <cmath>
#include <csetjmp>
#include <cstring>
#include <fstream>

#include "pforge/errors.hpp"

namespace pforge::io {

namespace {

struct PngWriteState {
  std::vector<std::uint8_t>* out;
};

void png_write_cb(png_structp png, png_bytep data, png_size_t len) {
  auto* state = static_cast<PngWriteState*>(png_get_io_ptr(png));
  state->out->insert(state->out->end(), data, data + len);
}

void png_flush_cb(png_structp) {}

struct PngReadState {
  const std::uint8_t* data;
  std::size_t size;
  std::size_t offset;
};

void png_read_cb(png_structp png, png_bytep out, png_size_t len) {
  auto* state = static_cast<PngReadState*>(png_get_io_ptr(png));
  if (state->offset + len > state->size) {
    png_error(png, "read past end of buffer");
  }
  std::memcpy(out, state->data + state->offset, len);
  state->offset += len;
}

[[noreturn]] void png_error_cb(png_structp png, png_const_charp msg) {
  (void)msg;
  longjmp(png_jmpbuf(png), 1);
}

void png_warning_cb(png_structp, png_const_charp) {}

std::vector<std::uint8_t> encode_png_impl(int width, int height, int bit_depth,
                                          int color_type,
                                          const std::vector<png_bytep>& rows) {
  std::vector<std::uint8_t> out;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                            png_error_cb, png_warning_cb);
  if (png == nullptr) {
    throw IoError("libpng write struct allocation failed");
  }
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("libpng info struct allocation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("png encoding failed");
  }
  PngWriteState state{&out};
  png_set_write_fn(png, &state, png_write_cb, png_flush_cb);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width),
               static_cast<png_uint_32>(height), bit_depth, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (bit_depth == 16) {
    png_set_swap(png);  // buffers are host-endian (little on every target here)
  }
  png_write_image(png, const_cast<png_bytepp>(rows.data()));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

}  // namespace

std::vector<std::uint8_t> encode_png(const Rgb8Image& image) {
  if (image.width <= 0 || image.height <= 0) {
    throw EmptyFrame("cannot encode an empty image");
  }
  if (image.pixels.size() != static_cast<std::size_t>(image.width) *
                                 static_cast<std::size_t>(image.height) * 3) {
    throw InvalidParameter("rgb8 buffer size does not match dimensions");
  }
  std::vector<png_bytep> rows(static_cast<std::size_t>(image.height));
  for (int y = 0; y < image.height; ++y) {
    rows[static_cast<std::size_t>(y)] = const_cast<png_bytep>(
        image.pixels.data() + static_cast<std::size_t>(y) * image.width * 3);
  }
  return encode_png_impl(image.width, image.height, 8, PNG_COLOR_TYPE_RGB,
                         rows);
}

std::vector<std::uint8_t> encode_png(const Gray16Image& image) {
  if (image.width <= 0 || image.height <= 0) {
    throw EmptyFrame("cannot encode an empty image");
  }
  if (image.pixels.size() != static_cast<std::size_t>(image.width) *
                                 static_cast<std::size_t>(image.height)) {
    throw InvalidParameter("gray16 buffer size does not match dimensions");
  }
  std::vector<png_bytep> rows(static_cast<std::size_t>(image.height));
  for (int y = 0; y < image.height; ++y) {
    rows[static_cast<std::size_t>(y)] =
        const_cast<png_bytep>(reinterpret_cast<const std::uint8_t*>(
            image.pixels.data() + static_cast<std::size_t>(y) * image.width));
  }
  return encode_png_impl(image.width, image.height, 16, PNG_COLOR_TYPE_GRAY,
                         rows);
}

namespace {

struct PngReader {
  png_structp png = nullptr;
  png_infop info = nullptr;
  PngReadState state{};

  explicit PngReader(const std::vector<std::uint8_t>& bytes) {
    png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_cb,
                                 png_warning_cb);
    if (png == nullptr) {
      throw IoError("libpng read struct allocation failed");
    }
    info = png_create_info_struct(png);
    if (info == nullptr) {
      png_destroy_read_struct(&png, nullptr, nullptr);
      throw IoError("libpng info struct allocation failed");
    }
    state = PngReadState{bytes.data(), bytes.size(), 0};
  }
  ~PngReader() { png_destroy_read_struct(&png, &info, nullptr); }
  PngReader(const PngReader&) = delete;
  PngReader& operator=(const PngReader&) = delete;
};

}  // namespace

Rgb8Image decode_png_rgb8(const std::vector<std::uint8_t>& bytes) {
  PngReader reader(bytes);
  if (setjmp(png_jmpbuf(reader.png))) {
    throw DecodeError("malformed png");
  }
  png_set_read_fn(reader.png, &reader.state, png_read_cb);
  png_read_info(reader.png, reader.info);

  // Normalize anything to 8-bit RGB.
  png_set_expand(reader.png);
  png_set_strip_16(reader.png);
  png_set_strip_alpha(reader.png);
  png_set_gray_to_rgb(reader.png);
  png_read_update_info(reader.png, reader.info);

  const png_uint_32 width = png_get_image_width(reader.png, reader.info);
  const png_uint_32 height = png_get_image_height(reader.png, reader.info);
  if (png_get_channels(reader.png, reader.info) != 3 ||
      png_get_bit_depth(reader.png, reader.info) != 8) {
    throw DecodeError("png did not normalize to 8-bit rgb");
  }

  Rgb8Image image;
  image.width = static_cast<int>(width);
  image.height = static_cast<int>(height);
  image.pixels.resize(static_cast<std::size_t>(width) * height * 3);
  std::vector<png_bytep> rows(height);
  for (png_uint_32 y = 0; y < height; ++y) {
    rows[y] = image.pixels.data() + static_cast<std::size_t>(y) * width * 3;
  }
  png_read_image(reader.png, rows.data());
  png_read_end(reader.png, nullptr);
  return image;
}

Gray16Image decode_png_gray16(const std::vector<std::uint8_t>& bytes) {
  PngReader reader(bytes);
  if (setjmp(png_jmpbuf(reader.png))) {
    throw DecodeError("malformed png");
  }
  png_set_read_fn(reader.png, &reader.state, png_read_cb);
  png_read_info(reader.png, reader.info);

  if (png_get_color_type(reader.png, reader.info) != PNG_COLOR_TYPE_GRAY ||
      png_get_bit_depth(reader.png, reader.info) != 16) {
    throw DecodeError("depth png must be 16-bit grayscale");
  }
  png_set_swap(reader.png);
  png_read_update_info(reader.png, reader.info);

  const png_uint_32 width = png_get_image_width(reader.png, reader.info);
  const png_uint_32 height = png_get_image_height(reader.png, reader.info);
  Gray16Image image;
  image.width = static_cast<int>(width);
  image.height = static_cast<int>(height);
  image.pixels.resize(static_cast<std::size_t>(width) * height);
  std::vector<png_bytep> rows(height);
  for (png_uint_32 y = 0; y < height; ++y) {
    rows[y] = reinterpret_cast<png_bytep>(
        image.pixels.data() + static_cast<std::size_t>(y) * width);
  }
  png_read_image(reader.png, rows.data());
  png_read_end(reader.png, nullptr);
  return image;
}

namespace {

struct JpegErrorMgr {
  jpeg_error_mgr base;
  jmp_buf jump;
};

[[noreturn]] void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
  longjmp(err->jump, 1);
}

void jpeg_emit_nothing(j_common_ptr, int) {}

}  // namespace

std::vector<std::uint8_t> encode_jpeg(const Rgb8Image& image, int quality) {
  if (quality < 1 || quality > 100) {
    throw InvalidParameter("jpeg quality must be in [1, 100]");
  }
  if (image.width <= 0 || image.height <= 0) {
    throw EmptyFrame("cannot encode an empty image");
  }

  jpeg_compress_struct cinfo;
  JpegErrorMgr err;
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_error_exit;
  err.base.emit_message = jpeg_emit_nothing;

  unsigned char* buffer = nullptr;
  unsigned long buffer_size = 0;
  if (setjmp(err.jump)) {
    jpeg_destroy_compress(&cinfo);
    if (buffer != nullptr) {
      free(buffer);
    }
    throw IoError("jpeg encoding failed");
  }

  jpeg_create_compress(&cinfo);
  jpeg_mem_dest(&cinfo, &buffer, &buffer_size);
  cinfo.image_width = static_cast<JDIMENSION>(image.width);
  cinfo.image_height = static_cast<JDIMENSION>(image.height);
  cinfo.input_components = 3;
  cinfo.in_color_space = JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  jpeg_start_compress(&cinfo, TRUE);

  const std::size_t stride = static_cast<std::size_t>(image.width) * 3;
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row = const_cast<JSAMPROW>(image.pixels.data() +
                                        cinfo.next_scanline * stride);
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);

  std::vector<std::uint8_t> out(buffer, buffer + buffer_size);
  free(buffer);
  return out;
}

Rgb8Image decode_jpeg_rgb8(const std::vector<std::uint8_t>& bytes) {
  jpeg_decompress_struct cinfo;
  JpegErrorMgr err;
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_error_exit;
  err.base.emit_message = jpeg_emit_nothing;

  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw DecodeError("malformed jpeg");
  }

  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);

  Rgb8Image image;
  image.width = static_cast<int>(cinfo.output_width);
  image.height = static_cast<int>(cinfo.output_height);
  image.pixels.resize(static_cast<std::size_t>(image.width) * image.height * 3);
  const std::size_t stride = static_cast<std::size_t>(image.width) * 3;
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = image.pixels.data() + cinfo.output_scanline * stride;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return image;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "' for reading");
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) {
    throw IoError("read failed on '" + path.string() + "'");
  }
  return bytes;
}

void write_file(const std::filesystem::path& path,
                const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open '" + path.string() + "' for writing");
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw IoError("write failed on '" + path.string() + "'");
  }
}

std::uint8_t quantize_unit_to_u8(float v) {
  const float c = clamp01(v);
  return static_cast<std::uint8_t>(std::lround(c * 255.0f));
}

Rgb8Image to_rgb8(const RgbFrame& frame) {
  Rgb8Image image;
  image.width = frame.width;
  image.height = frame.height;
  image.pixels.resize(frame.pixels.size());
  for (std::size_t i = 0; i < frame.pixels.size(); ++i) {
    image.pixels[i] = quantize_unit_to_u8(frame.pixels[i]);
  }
  return image;
}

RgbFrame to_rgb_frame(const Rgb8Image& image, double timestamp) {
  RgbFrame frame(timestamp, image.width, image.height);
  for (std::size_t i = 0; i < image.pixels.size(); ++i) {
    frame.pixels[i] = u8_to_unit(image.pixels[i]);
  }
  return frame;
}

Gray16Image quantize_depth(const DepthFrame& frame, double scale,
                           std::size_t* saturated) {
  if (!(scale > 0.0)) {
    throw InvalidParameter("depth scale must be positive");
  }
  Gray16Image image;
  image.width = frame.width;
  image.height = frame.height;
  image.pixels.resize(frame.depths.size());
  std::size_t clipped = 0;
  for (std::size_t i = 0; i < frame.depths.size(); ++i) {
    const float d = frame.depths[i];
    if (DepthFrame::is_void(d)) {
      image.pixels[i] = 0;
      continue;
    }
    const double raw = std::round(static_cast<double>(d) * scale);
    if (raw > 65535.0) {
      // A reading the encoding cannot represent is recorded as missing
      // rather than silently pulled back into range.
      image.pixels[i] = 0;
      ++clipped;
    } else if (raw < 1.0) {
      // Depths below half a quantization step would collapse into the VOID
      // code; keep them at the smallest representable reading instead.
      image.pixels[i] = 1;
    } else {
      image.pixels[i] = static_cast<std::uint16_t>(raw);
    }
  }
  if (saturated != nullptr) {
    *saturated = clipped;
  }
  return image;
}

DepthFrame dequantize_depth(const Gray16Image& image, double scale,
                            double timestamp) {
  if (!(scale > 0.0)) {
    throw InvalidParameter("depth scale must be positive");
  }
  DepthFrame frame(timestamp, image.width, image.height);
  for (std::size_t i = 0; i < image.pixels.size(); ++i) {
    frame.depths[i] =
        image.pixels[i] == 0
            ? DepthFrame::kVoid
            : static_cast<float>(static_cast<double>(image.pixels[i]) / scale);
  }
  return frame;
}

}  // namespace pforge::io
