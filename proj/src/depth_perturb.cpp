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

#include "pforge/depth_perturb.hpp"

#include <cmath>
#include <vector>

namespace pforge::depth {

namespace {

void require_nonempty(const DepthFrame& frame) {
  if (frame.width <= 0 || frame.height <= 0) {
    throw EmptyFrame("depth perturbation needs a non-empty frame");
  }
}

void require_prob(double p, const char* name) {
  if (!(p >= 0.0) || !(p <= 1.0)) {
    throw InvalidParameter(std::string("parameter '") + name +
                           "' must be a probability");
  }
}

}  // namespace

DepthFrame apply_gaussian_noise(const DepthFrame& frame, double sigma_m,
                                RngStream& rng) {
  require_nonempty(frame);
  if (!(sigma_m >= 0.0) || !std::isfinite(sigma_m)) {
    throw InvalidParameter("depth noise sigma must be non-negative");
  }
  if (sigma_m == 0.0) {
    return frame;
  }
  DepthFrame out = frame;
  for (float& d : out.depths) {
    if (DepthFrame::is_void(d)) {
      continue;
    }
    const double noisy = static_cast<double>(d) + sigma_m * rng.gaussian();
    d = noisy < kMinMeasurableDepth ? kMinMeasurableDepth
                                    : static_cast<float>(noisy);
  }
  return out;
}

DepthFrame apply_edge_erosion(const DepthFrame& frame, int radius, double rho,
                              RngStream& rng) {
  require_nonempty(frame);
  if (radius < 0) {
    throw InvalidParameter("erosion radius must be non-negative");
  }
  require_prob(rho, "rho");

  const int w = frame.width;
  const int h = frame.height;
  std::vector<std::uint8_t> edge(static_cast<std::size_t>(w) * h, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (DepthFrame::is_void(frame.value(x, y))) {
        continue;
      }
      double gx = 0.0;
      if (x > 0 && x + 1 < w && !DepthFrame::is_void(frame.value(x - 1, y)) &&
          !DepthFrame::is_void(frame.value(x + 1, y))) {
        gx = (frame.value(x + 1, y) - frame.value(x - 1, y)) / 2.0;
      }
      double gy = 0.0;
      if (y > 0 && y + 1 < h && !DepthFrame::is_void(frame.value(x, y - 1)) &&
          !DepthFrame::is_void(frame.value(x, y + 1))) {
        gy = (frame.value(x, y + 1) - frame.value(x, y - 1)) / 2.0;
      }
      if (std::sqrt(gx * gx + gy * gy) > kEdgeGradientThreshold) {
        edge[static_cast<std::size_t>(y) * w + x] = 1;
      }
    }
  }

  // Dilate the edge set by `radius` (Chebyshev distance).
  std::vector<std::uint8_t> band(edge.size(), 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (edge[static_cast<std::size_t>(y) * w + x] == 0) {
        continue;
      }
      for (int dy = -radius; dy <= radius; ++dy) {
        const int sy = y + dy;
        if (sy < 0 || sy >= h) continue;
        for (int dx = -radius; dx <= radius; ++dx) {
          const int sx = x + dx;
          if (sx < 0 || sx >= w) continue;
          band[static_cast<std::size_t>(sy) * w + sx] = 1;
        }
      }
    }
  }

  DepthFrame out = frame;
  for (std::size_t i = 0; i < out.depths.size(); ++i) {
    if (band[i] == 0 || DepthFrame::is_void(out.depths[i])) {
      continue;
    }
    if (rng.uniform() < rho) {
      out.depths[i] = DepthFrame::kVoid;
    }
  }
  return out;
}

DepthFrame apply_random_missing(const DepthFrame& frame, double p,
                                RngStream& rng) {
  require_nonempty(frame);
  require_prob(p, "p");
  DepthFrame out = frame;
  for (float& d : out.depths) {
    if (DepthFrame::is_void(d)) {
      continue;
    }
    if (rng.uniform() < p) {
      d = DepthFrame::kVoid;
    }
  }
  return out;
}

DepthFrame apply_range_clip(const DepthFrame& frame, double min_m,
                            double max_m) {
  require_nonempty(frame);
  if (!(min_m > 0.0) || !(max_m > min_m)) {
    throw InvalidParameter("range clip needs 0 < min < max");
  }
  // Compare at the data's precision so a reading equal to the bound
  // survives even when the configured bound is not float-representable.
  const float lo = static_cast<float>(min_m);
  const float hi = static_cast<float>(max_m);
  DepthFrame out = frame;
  for (float& d : out.depths) {
    if (DepthFrame::is_void(d)) {
      continue;
    }
    if (d < lo || d > hi) {
      d = DepthFrame::kVoid;
    }
  }
  return out;
}

DepthFrame apply_depth(const DepthFrame& frame, const PerturbationSpec& spec,
                       std::uint64_t frame_index, const SeverityTable& table) {
  spec.validate();
  if (!kind_is_depth(spec.kind)) {
    throw KindMismatch("apply_depth requires a depth perturbation kind");
  }
  require_nonempty(frame);

  const ParamSet& params = table.params(spec.kind, spec.severity);
  RngStream rng(spec.seed, frame_index, kind_id(spec.kind), RngLane::kDraw);

  switch (spec.kind) {
    case PerturbationKind::kDepthGaussianNoise:
      return apply_gaussian_noise(frame, params.get("sigma"), rng);
    case PerturbationKind::kDepthEdgeErosion:
      return apply_edge_erosion(frame, static_cast<int>(params.get_int("radius")),
                                params.get("rho"), rng);
    case PerturbationKind::kDepthRandomMissing:
      return apply_random_missing(frame, params.get("p"), rng);
    case PerturbationKind::kDepthRangeClipping:
      return apply_range_clip(frame, params.get("min"), params.get("max"));
    default:
      throw KindMismatch("unhandled depth kind");
  }
}

}  // namespace pforge::depth
