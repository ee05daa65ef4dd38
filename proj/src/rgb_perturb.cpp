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

#include "pforge/rgb_perturb.hpp"

#include <algorithm>
#include <cmath>

#include "pforge/image_codec.hpp"

namespace pforge::rgb {

namespace {

constexpr double kFogGray = 0.7;
constexpr double kFrostFloor = 0.8;
constexpr int kSpatterSmoothRadius = 2;

void require_nonempty(const RgbFrame& frame) {
  if (frame.width <= 0 || frame.height <= 0) {
    throw EmptyFrame("rgb perturbation needs a non-empty frame");
  }
}

void require_range(double v, double lo, double hi, const char* name) {
  if (!(v >= lo) || !(v <= hi) || !std::isfinite(v)) {
    throw InvalidParameter(std::string("parameter '") + name +
                           "' out of range");
  }
}

int clamp_idx(int v, int lo, int hi) {
  return v < lo ? lo : (v > hi ? hi : v);
}

}  // namespace

bool is_noise_kind(PerturbationKind kind) {
  switch (kind) {
    case PerturbationKind::kGaussianNoise:
    case PerturbationKind::kShotNoise:
    case PerturbationKind::kImpulseNoise:
    case PerturbationKind::kSpeckleNoise:
      return true;
    default:
      return false;
  }
}

bool is_blur_kind(PerturbationKind kind) {
  switch (kind) {
    case PerturbationKind::kDefocusBlur:
    case PerturbationKind::kGlassBlur:
    case PerturbationKind::kMotionBlur:
    case PerturbationKind::kGaussianBlur:
      return true;
    default:
      return false;
  }
}

bool is_environment_kind(PerturbationKind kind) {
  switch (kind) {
    case PerturbationKind::kSnow:
    case PerturbationKind::kFrost:
    case PerturbationKind::kFog:
    case PerturbationKind::kSpatter:
      return true;
    default:
      return false;
  }
}

bool is_postprocess_kind(PerturbationKind kind) {
  switch (kind) {
    case PerturbationKind::kBrightness:
    case PerturbationKind::kContrast:
    case PerturbationKind::kJpegCompression:
    case PerturbationKind::kPixelate:
      return true;
    default:
      return false;
  }
}

RgbFrame apply_noise(const RgbFrame& frame, PerturbationKind kind,
                     const ParamSet& params, RngStream& rng) {
  require_nonempty(frame);
  RgbFrame out = frame;

  switch (kind) {
    case PerturbationKind::kGaussianNoise: {
      const double sigma = params.get("sigma");
      require_range(sigma, 0.0, 10.0, "sigma");
      for (float& v : out.pixels) {
        v = clamp01(static_cast<float>(v + sigma * rng.gaussian()));
      }
      break;
    }
    case PerturbationKind::kShotNoise: {
      const double lambda = params.get("lambda");
      if (!(lambda > 0.0)) {
        throw InvalidParameter("shot noise lambda must be positive");
      }
      for (float& v : out.pixels) {
        const double counts =
            static_cast<double>(rng.poisson(static_cast<double>(v) * lambda));
        v = clamp01(static_cast<float>(counts / lambda));
      }
      break;
    }
    case PerturbationKind::kImpulseNoise: {
      const double p = params.get("p");
      require_range(p, 0.0, 1.0, "p");
      const std::size_t n = out.pixel_count();
      for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.uniform();
        if (u < p / 2.0) {
          out.pixels[i * 3 + 0] = 0.0f;
          out.pixels[i * 3 + 1] = 0.0f;
          out.pixels[i * 3 + 2] = 0.0f;
        } else if (u < p) {
          out.pixels[i * 3 + 0] = 1.0f;
          out.pixels[i * 3 + 1] = 1.0f;
          out.pixels[i * 3 + 2] = 1.0f;
        }
      }
      break;
    }
    case PerturbationKind::kSpeckleNoise: {
      const double rho = params.get("rho");
      require_range(rho, 0.0, 10.0, "rho");
      for (float& v : out.pixels) {
        v = clamp01(static_cast<float>(v * (1.0 + rho * rng.gaussian())));
      }
      break;
    }
    default:
      throw KindMismatch("apply_noise called with a non-noise kind");
  }
  return out;
}

namespace {

BlurKernel normalized(BlurKernel kernel) {
  double sum = 0.0;
  for (double w : kernel.weights) {
    sum += w;
  }
  if (!(sum > 0.0)) {
    throw InvalidParameter("blur kernel has non-positive weight sum");
  }
  for (double& w : kernel.weights) {
    w /= sum;
  }
  return kernel;
}

BlurKernel identity_kernel() {
  BlurKernel k;
  k.size = 1;
  k.weights = {1.0};
  return k;
}

}  // namespace

BlurKernel build_kernel(PerturbationKind kind, const ParamSet& params,
                        RngStream& rng) {
  switch (kind) {
    case PerturbationKind::kDefocusBlur: {
      const long radius = params.get_int("radius");
      if (radius < 0) {
        throw InvalidParameter("defocus radius must be non-negative");
      }
      if (radius == 0) {
        return identity_kernel();
      }
      BlurKernel k;
      k.size = static_cast<int>(2 * radius + 1);
      k.weights.assign(static_cast<std::size_t>(k.size) * k.size, 0.0);
      for (long dy = -radius; dy <= radius; ++dy) {
        for (long dx = -radius; dx <= radius; ++dx) {
          if (dx * dx + dy * dy <= radius * radius) {
            k.weights[static_cast<std::size_t>(dy + radius) * k.size +
                      (dx + radius)] = 1.0;
          }
        }
      }
      return normalized(std::move(k));
    }
    case PerturbationKind::kGaussianBlur: {
      const double sigma = params.get("sigma");
      require_range(sigma, 0.0, 64.0, "sigma");
      if (sigma == 0.0) {
        return identity_kernel();
      }
      const int radius = static_cast<int>(std::ceil(3.0 * sigma));
      BlurKernel k;
      k.size = 2 * radius + 1;
      k.weights.resize(static_cast<std::size_t>(k.size) * k.size);
      for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
          k.weights[static_cast<std::size_t>(dy + radius) * k.size +
                    (dx + radius)] =
              std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
        }
      }
      return normalized(std::move(k));
    }
    case PerturbationKind::kMotionBlur: {
      const long length = params.get_int("length");
      if (length < 1) {
        throw InvalidParameter("motion length must be at least 1");
      }
      if (length == 1) {
        return identity_kernel();
      }
      // One streak direction per frame; mirrored directions give the same
      // kernel, so half a turn covers everything.
      const double angle = rng.uniform() * M_PI;
      const double cx = std::cos(angle);
      const double cy = std::sin(angle);
      const long radius = (length - 1) / 2 + (length % 2 == 0 ? 1 : 0);
      BlurKernel k;
      k.size = static_cast<int>(2 * radius + 1);
      k.weights.assign(static_cast<std::size_t>(k.size) * k.size, 0.0);
      for (long step = 0; step < length; ++step) {
        const double t = static_cast<double>(step) -
                         static_cast<double>(length - 1) / 2.0;
        const long dx = std::lround(t * cx);
        const long dy = std::lround(t * cy);
        k.weights[static_cast<std::size_t>(dy + radius) * k.size +
                  (dx + radius)] += 1.0;
      }
      return normalized(std::move(k));
    }
    default:
      throw KindMismatch("no fixed kernel for this kind");
  }
}

RgbFrame convolve(const RgbFrame& frame, const BlurKernel& kernel) {
  require_nonempty(frame);
  if (kernel.size < 1 || kernel.size % 2 == 0 ||
      kernel.weights.size() !=
          static_cast<std::size_t>(kernel.size) * kernel.size) {
    throw InvalidParameter("malformed blur kernel");
  }
  if (kernel.size > frame.width || kernel.size > frame.height) {
    throw KernelTooLarge("kernel exceeds frame dimensions");
  }
  if (kernel.size == 1 && kernel.weights[0] == 1.0) {
    return frame;
  }

  RgbFrame out(frame.timestamp, frame.width, frame.height);
  const int r = kernel.size / 2;
  for (int y = 0; y < frame.height; ++y) {
    for (int x = 0; x < frame.width; ++x) {
      double acc[3] = {0.0, 0.0, 0.0};
      for (int dy = -r; dy <= r; ++dy) {
        const int sy = clamp_idx(y + dy, 0, frame.height - 1);
        for (int dx = -r; dx <= r; ++dx) {
          const int sx = clamp_idx(x + dx, 0, frame.width - 1);
          const double w = kernel.at(dx, dy);
          acc[0] += w * frame.value(sx, sy, 0);
          acc[1] += w * frame.value(sx, sy, 1);
          acc[2] += w * frame.value(sx, sy, 2);
        }
      }
      out.value(x, y, 0) = clamp01(static_cast<float>(acc[0]));
      out.value(x, y, 1) = clamp01(static_cast<float>(acc[1]));
      out.value(x, y, 2) = clamp01(static_cast<float>(acc[2]));
    }
  }
  return out;
}

namespace {

RgbFrame glass_blur(const RgbFrame& frame, const ParamSet& params,
                    RngStream& rng) {
  const long delta = params.get_int("delta");
  const long iterations = params.get_int("iterations");
  const double sigma = params.get("sigma");
  if (delta < 0 || iterations < 0) {
    throw InvalidParameter("glass blur delta and iterations must be >= 0");
  }
  require_range(sigma, 0.0, 64.0, "sigma");

  RgbFrame out = frame;
  const long span = 2 * delta + 1;
  for (long it = 0; it < iterations; ++it) {
    for (int y = 0; y < out.height; ++y) {
      for (int x = 0; x < out.width; ++x) {
        if (delta == 0) {
          continue;  // swap with self; keep draw usage at zero for identity
        }
        const int dx = static_cast<int>(
            rng.uniform_below(static_cast<std::uint64_t>(span))) -
            static_cast<int>(delta);
        const int dy = static_cast<int>(
            rng.uniform_below(static_cast<std::uint64_t>(span))) -
            static_cast<int>(delta);
        const int sx = clamp_idx(x + dx, 0, out.width - 1);
        const int sy = clamp_idx(y + dy, 0, out.height - 1);
        for (int c = 0; c < 3; ++c) {
          std::swap(out.value(x, y, c), out.value(sx, sy, c));
        }
      }
    }
  }
  if (sigma == 0.0) {
    return out;
  }
  ParamSet gauss(std::map<std::string, double>{{"sigma", sigma}});
  RngStream unused(0);
  return convolve(out, build_kernel(PerturbationKind::kGaussianBlur, gauss,
                                    unused));
}

}  // namespace

RgbFrame apply_blur(const RgbFrame& frame, PerturbationKind kind,
                    const ParamSet& params, RngStream& rng) {
  require_nonempty(frame);
  switch (kind) {
    case PerturbationKind::kGlassBlur:
      return glass_blur(frame, params, rng);
    case PerturbationKind::kDefocusBlur:
    case PerturbationKind::kMotionBlur:
    case PerturbationKind::kGaussianBlur:
      return convolve(frame, build_kernel(kind, params, rng));
    default:
      throw KindMismatch("apply_blur called with a non-blur kind");
  }
}

namespace {

std::vector<std::uint8_t> dilate(const std::vector<std::uint8_t>& mask,
                                 int width, int height, int radius) {
  std::vector<std::uint8_t> out(mask.size(), 0);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (mask[static_cast<std::size_t>(y) * width + x] == 0) {
        continue;
      }
      const int y0 = clamp_idx(y - radius, 0, height - 1);
      const int y1 = clamp_idx(y + radius, 0, height - 1);
      const int x0 = clamp_idx(x - radius, 0, width - 1);
      const int x1 = clamp_idx(x + radius, 0, width - 1);
      for (int yy = y0; yy <= y1; ++yy) {
        for (int xx = x0; xx <= x1; ++xx) {
          out[static_cast<std::size_t>(yy) * width + xx] = 1;
        }
      }
    }
  }
  return out;
}

/// Per-cell uniform noise interpolated bilinearly to pixel resolution.
/// Smooth at the cell scale, deterministic in the draw order of the grid.
std::vector<float> cellular_noise(int width, int height, int cell,
                                  RngStream& rng) {
  const int gw = (width + cell - 1) / cell + 1;
  const int gh = (height + cell - 1) / cell + 1;
  std::vector<double> grid(static_cast<std::size_t>(gw) * gh);
  for (double& g : grid) {
    g = rng.uniform();
  }
  std::vector<float> out(static_cast<std::size_t>(width) * height);
  for (int y = 0; y < height; ++y) {
    const double fy = static_cast<double>(y) / cell;
    const int gy = static_cast<int>(fy);
    const double ty = fy - gy;
    for (int x = 0; x < width; ++x) {
      const double fx = static_cast<double>(x) / cell;
      const int gx = static_cast<int>(fx);
      const double tx = fx - gx;
      const double v00 = grid[static_cast<std::size_t>(gy) * gw + gx];
      const double v01 = grid[static_cast<std::size_t>(gy) * gw + gx + 1];
      const double v10 = grid[static_cast<std::size_t>(gy + 1) * gw + gx];
      const double v11 = grid[static_cast<std::size_t>(gy + 1) * gw + gx + 1];
      const double top = v00 + (v01 - v00) * tx;
      const double bottom = v10 + (v11 - v10) * tx;
      out[static_cast<std::size_t>(y) * width + x] =
          static_cast<float>(top + (bottom - top) * ty);
    }
  }
  return out;
}

std::vector<float> box_smooth(const std::vector<float>& in, int width,
                              int height, int radius) {
  std::vector<float> out(in.size());
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      int n = 0;
      for (int dy = -radius; dy <= radius; ++dy) {
        const int sy = y + dy;
        if (sy < 0 || sy >= height) continue;
        for (int dx = -radius; dx <= radius; ++dx) {
          const int sx = x + dx;
          if (sx < 0 || sx >= width) continue;
          acc += in[static_cast<std::size_t>(sy) * width + sx];
          ++n;
        }
      }
      out[static_cast<std::size_t>(y) * width + x] =
          static_cast<float>(acc / n);
    }
  }
  return out;
}

}  // namespace

WeatherLayer build_weather_layer(PerturbationKind kind, const ParamSet& params,
                                 int width, int height, RngStream& rng) {
  if (!is_environment_kind(kind)) {
    throw KindMismatch("build_weather_layer called with a non-weather kind");
  }
  if (width <= 0 || height <= 0) {
    throw EmptyFrame("weather layer needs a non-empty frame size");
  }
  const std::size_t n =
      static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  WeatherLayer layer;
  layer.width = width;
  layer.height = height;
  layer.alpha = static_cast<float>(params.get("alpha"));
  require_range(layer.alpha, 0.0, 1.0, "alpha");

  switch (kind) {
    case PerturbationKind::kSnow: {
      const double density = params.get("density");
      require_range(density, 0.0, 1.0, "density");
      std::vector<std::uint8_t> seeds(n, 0);
      for (std::size_t i = 0; i < n; ++i) {
        if (rng.uniform() < density) {
          seeds[i] = 1;
        }
      }
      layer.mask = dilate(seeds, width, height, 1);
      layer.values.assign(n, 1.0f);  // white flakes
      break;
    }
    case PerturbationKind::kFrost: {
      const long cell = params.get_int("cell");
      if (cell < 1) {
        throw InvalidParameter("frost cell must be at least 1");
      }
      const std::vector<float> noise =
          cellular_noise(width, height, static_cast<int>(cell), rng);
      layer.values.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        layer.values[i] = static_cast<float>(
            kFrostFloor + (1.0 - kFrostFloor) * noise[i]);
      }
      break;
    }
    case PerturbationKind::kFog: {
      layer.values.assign(n, static_cast<float>(kFogGray));
      break;
    }
    case PerturbationKind::kSpatter: {
      const double coverage = params.get("coverage");
      require_range(coverage, 0.0, 1.0, "coverage");
      std::vector<float> field(n);
      for (float& v : field) {
        v = static_cast<float>(rng.uniform());
      }
      field = box_smooth(field, width, height, kSpatterSmoothRadius);
      // Threshold at the empirical quantile so the blotch area tracks the
      // requested coverage exactly, independent of the field's distribution.
      std::vector<float> sorted = field;
      const std::size_t cut = static_cast<std::size_t>(
          std::min<double>(static_cast<double>(n - 1),
                           std::floor((1.0 - coverage) * n)));
      std::nth_element(sorted.begin(), sorted.begin() + cut, sorted.end());
      const float threshold = sorted[cut];
      layer.mask.assign(n, 0);
      for (std::size_t i = 0; i < n; ++i) {
        if (field[i] > threshold) {
          layer.mask[i] = 1;
        }
      }
      layer.values.assign(n, 0.1f);  // dark splashes
      break;
    }
    default:
      throw KindMismatch("build_weather_layer called with a non-weather kind");
  }
  return layer;
}

RgbFrame blend_weather(const RgbFrame& frame, const WeatherLayer& layer) {
  require_nonempty(frame);
  if (layer.width != frame.width || layer.height != frame.height ||
      layer.values.size() != frame.pixel_count() ||
      (!layer.mask.empty() && layer.mask.size() != frame.pixel_count())) {
    throw InvalidParameter("weather layer does not match the frame");
  }
  RgbFrame out = frame;
  const double alpha = layer.alpha;
  for (std::size_t i = 0; i < frame.pixel_count(); ++i) {
    if (!layer.mask.empty() && layer.mask[i] == 0) {
      continue;
    }
    const double w = layer.values[i];
    for (int c = 0; c < 3; ++c) {
      const double v = (1.0 - alpha) * out.pixels[i * 3 + c] + alpha * w;
      out.pixels[i * 3 + c] = clamp01(static_cast<float>(v));
    }
  }
  return out;
}

RgbFrame apply_environment(const RgbFrame& frame, PerturbationKind kind,
                           const ParamSet& params, RngStream& rng) {
  require_nonempty(frame);
  return blend_weather(frame, build_weather_layer(kind, params, frame.width,
                                                  frame.height, rng));
}

RgbFrame apply_postprocess(const RgbFrame& frame, PerturbationKind kind,
                           const ParamSet& params, RngStream& rng) {
  (void)rng;  // post-processing kinds are deterministic given their params
  require_nonempty(frame);
  switch (kind) {
    case PerturbationKind::kBrightness: {
      const double offset = params.get("offset");
      require_range(offset, -1.0, 1.0, "offset");
      RgbFrame out = frame;
      for (float& v : out.pixels) {
        v = clamp01(static_cast<float>(v + offset));
      }
      return out;
    }
    case PerturbationKind::kContrast: {
      const double alpha = params.get("alpha");
      require_range(alpha, 0.0, 16.0, "alpha");
      double sum = 0.0;
      for (float v : frame.pixels) {
        sum += v;
      }
      const double mean = sum / static_cast<double>(frame.pixels.size());
      RgbFrame out = frame;
      // Fused form: alpha == 1 reproduces the input bit for bit, alpha == 0
      // collapses to the mean.
      for (float& v : out.pixels) {
        v = clamp01(static_cast<float>(alpha * v + (1.0 - alpha) * mean));
      }
      return out;
    }
    case PerturbationKind::kJpegCompression: {
      const long quality = params.get_int("quality");
      const io::Rgb8Image encoded = io::to_rgb8(frame);
      const std::vector<std::uint8_t> bytes =
          io::encode_jpeg(encoded, static_cast<int>(quality));
      return io::to_rgb_frame(io::decode_jpeg_rgb8(bytes), frame.timestamp);
    }
    case PerturbationKind::kPixelate: {
      const long block = params.get_int("block");
      if (block < 1) {
        throw InvalidParameter("pixelate block must be at least 1");
      }
      RgbFrame out = frame;
      for (int by = 0; by < frame.height; by += static_cast<int>(block)) {
        const int y1 = std::min(frame.height, by + static_cast<int>(block));
        for (int bx = 0; bx < frame.width; bx += static_cast<int>(block)) {
          const int x1 = std::min(frame.width, bx + static_cast<int>(block));
          double acc[3] = {0.0, 0.0, 0.0};
          const double count = static_cast<double>((y1 - by) * (x1 - bx));
          for (int y = by; y < y1; ++y) {
            for (int x = bx; x < x1; ++x) {
              for (int c = 0; c < 3; ++c) {
                acc[c] += frame.value(x, y, c);
              }
            }
          }
          for (int y = by; y < y1; ++y) {
            for (int x = bx; x < x1; ++x) {
              for (int c = 0; c < 3; ++c) {
                out.value(x, y, c) = static_cast<float>(acc[c] / count);
              }
            }
          }
        }
      }
      return out;
    }
    default:
      throw KindMismatch("apply_postprocess called with a non-post kind");
  }
}

RgbFrame apply_rgb(const RgbFrame& frame, const PerturbationSpec& spec,
                   std::uint64_t frame_index, const SeverityTable& table) {
  spec.validate();
  if (!kind_is_rgb(spec.kind)) {
    throw KindMismatch("apply_rgb requires an rgb perturbation kind");
  }
  require_nonempty(frame);

  SeverityLevel level = spec.severity;
  if (spec.mode == PerturbationMode::kDynamic) {
    RngStream pick(spec.seed, frame_index, kind_id(spec.kind),
                   RngLane::kSeverity);
    level = kAllLevels[pick.uniform_below(3)];
  }
  const ParamSet& params = table.params(spec.kind, level);

  RngStream draw(spec.seed, frame_index, kind_id(spec.kind), RngLane::kDraw);
  RngStream shape(spec.seed, frame_index, kind_id(spec.kind), RngLane::kShape);

  if (is_noise_kind(spec.kind)) {
    return apply_noise(frame, spec.kind, params, draw);
  }
  if (is_blur_kind(spec.kind)) {
    // Glass swaps are bulk draws; the motion-blur angle is a shape draw.
    RngStream& rng =
        spec.kind == PerturbationKind::kMotionBlur ? shape : draw;
    return apply_blur(frame, spec.kind, params, rng);
  }
  if (is_environment_kind(spec.kind)) {
    return apply_environment(frame, spec.kind, params, shape);
  }
  return apply_postprocess(frame, spec.kind, params, draw);
}

}  // namespace pforge::rgb
