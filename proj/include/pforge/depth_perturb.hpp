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

#ifndef PFORGE_DEPTH_PERTURB_HPP
#define PFORGE_DEPTH_PERTURB_HPP

#include <cstdint>

#include "pforge/rng.hpp"
#include "pforge/severity.hpp"
#include "pforge/types.hpp"

namespace pforge::depth {

/// Gradient magnitude above which a pixel counts as a depth edge, in meters
/// per pixel.
inline constexpr double kEdgeGradientThreshold = 0.1;

/// Smallest depth a noisy reading can shrink to, in meters.  Keeps additive
/// noise from forging VOID codes.
inline constexpr float kMinMeasurableDepth = 0.001f;

/// Adds N(0, sigma^2) meters to every reading.  VOID pixels stay VOID, and
/// results are floored at kMinMeasurableDepth.
DepthFrame apply_gaussian_noise(const DepthFrame& frame, double sigma_m,
                                RngStream& rng);

/// Voids measurements around depth discontinuities.  Pixels whose central-
/// difference gradient exceeds kEdgeGradientThreshold seed an edge band that
/// is dilated by `radius`; each banded reading is dropped with probability
/// `rho`.
DepthFrame apply_edge_erosion(const DepthFrame& frame, int radius, double rho,
                              RngStream& rng);

/// Voids each reading independently with probability p.
DepthFrame apply_random_missing(const DepthFrame& frame, double p,
                                RngStream& rng);

/// Voids readings outside [min_m, max_m].  Boundary values survive, so the
/// operation is idempotent.
DepthFrame apply_range_clip(const DepthFrame& frame, double min_m,
                            double max_m);

/// Applies one depth perturbation to one frame, with randomness keyed by
/// (spec.seed, frame_index, kind) exactly like the RGB pipeline.
DepthFrame apply_depth(const DepthFrame& frame, const PerturbationSpec& spec,
                       std::uint64_t frame_index, const SeverityTable& table);

}  // namespace pforge::depth

#endif  // PFORGE_DEPTH_PERTURB_HPP
