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

#ifndef PFORGE_RGB_PERTURB_HPP
#define PFORGE_RGB_PERTURB_HPP

#include <cstdint>
#include <vector>

#include "pforge/rng.hpp"
#include "pforge/severity.hpp"
#include "pforge/types.hpp"

namespace pforge::rgb {

bool is_noise_kind(PerturbationKind kind);
bool is_blur_kind(PerturbationKind kind);
bool is_environment_kind(PerturbationKind kind);
bool is_postprocess_kind(PerturbationKind kind);

/// Square convolution kernel with odd side length.  Weights sum to one.
struct BlurKernel {
  int size = 1;                  // odd
  std::vector<double> weights;   // size * size, row-major

  double at(int dx, int dy) const {
    const int r = size / 2;
    return weights[static_cast<std::size_t>(dy + r) * size + (dx + r)];
  }
};

/// Additive and multiplicative sensor noise: gaussian, shot, impulse,
/// speckle.  Output values are clamped to [0, 1].
RgbFrame apply_noise(const RgbFrame& frame, PerturbationKind kind,
                     const ParamSet& params, RngStream& rng);

/// Builds the kernel for defocus, motion, or gaussian blur.  Motion blur
/// draws its direction from `rng`.  Glass blur has no fixed kernel, asking
/// for one is a KindMismatch.
BlurKernel build_kernel(PerturbationKind kind, const ParamSet& params,
                        RngStream& rng);

/// Convolution with replicate edge padding.  Throws KernelTooLarge when the
/// kernel exceeds either image dimension.
RgbFrame convolve(const RgbFrame& frame, const BlurKernel& kernel);

/// Defocus, glass, motion, or gaussian blur.  Glass blur runs `iterations`
/// passes of local pixel swaps (offsets up to `delta`) followed by a light
/// gaussian pass of width `sigma`.
RgbFrame apply_blur(const RgbFrame& frame, PerturbationKind kind,
                    const ParamSet& params, RngStream& rng);

/// A translucent overlay: the weather image W, its opacity, and an optional
/// mask restricting the blend to part of the frame.
struct WeatherLayer {
  int width = 0;
  int height = 0;
  std::vector<float> values;       // width * height, the W image
  float alpha = 0.0f;
  std::vector<std::uint8_t> mask;  // empty, or width * height with 0/1
};

/// Builds the overlay for snow, frost, fog, or spatter at the given frame
/// size.  Snow and spatter are masked; frost and fog cover the whole frame.
WeatherLayer build_weather_layer(PerturbationKind kind, const ParamSet& params,
                                 int width, int height, RngStream& rng);

/// out = (1 - alpha) * in + alpha * W  on masked pixels (everywhere when the
/// mask is empty).
RgbFrame blend_weather(const RgbFrame& frame, const WeatherLayer& layer);

RgbFrame apply_environment(const RgbFrame& frame, PerturbationKind kind,
                           const ParamSet& params, RngStream& rng);

/// Brightness shift, contrast rescale about the frame mean, a real JPEG
/// encode/decode round trip, or block-mean pixelation.
RgbFrame apply_postprocess(const RgbFrame& frame, PerturbationKind kind,
                           const ParamSet& params, RngStream& rng);

/// Applies one RGB perturbation to one frame of a sequence.  Static mode
/// uses spec.severity for every frame; dynamic mode re-draws the level per
/// frame.  All randomness is keyed by (spec.seed, frame_index, kind, lane),
/// so frames can be processed in any order or in parallel and still come out
/// bitwise identical.
RgbFrame apply_rgb(const RgbFrame& frame, const PerturbationSpec& spec,
                   std::uint64_t frame_index, const SeverityTable& table);

}  // namespace pforge::rgb

#endif  // PFORGE_RGB_PERTURB_HPP
