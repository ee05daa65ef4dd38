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

#include "pforge/misalign.hpp"

#include "pforge/rng.hpp"
#include "pforge/severity.hpp"

namespace pforge {

void MisalignSpec::validate() const {
  if (delay_frames < 0) {
    throw InvalidParameter("misalignment delay must be non-negative");
  }
  if (jitter < 0 || jitter > delay_frames) {
    throw InvalidParameter("misalignment jitter must be in [0, delay]");
  }
}

SensorSequence apply_misalignment(const SensorSequence& seq,
                                  const MisalignSpec& spec) {
  spec.validate();
  require_aligned(seq);

  const std::size_t n = seq.rgb.size();
  const std::size_t reach =
      static_cast<std::size_t>(spec.delay_frames) +
      static_cast<std::size_t>(spec.jitter);
  if (reach >= n) {
    throw DelayExceedsSequence(
        "misalignment delay leaves no frames in the sequence");
  }
  const std::size_t out_n = n - reach;

  SensorSequence out;
  out.rgb.reserve(out_n);
  out.depth.reserve(out_n);
  std::vector<Pose> poses;
  poses.reserve(out_n);

  for (std::size_t i = 0; i < out_n; ++i) {
    std::size_t offset = static_cast<std::size_t>(spec.delay_frames);
    if (spec.jitter > 0) {
      RngStream rng(spec.seed, static_cast<std::uint64_t>(i),
                    kind_id(PerturbationKind::kSensorMisalignment),
                    RngLane::kOffset);
      const std::uint64_t span = 2ull * spec.jitter + 1ull;
      offset += rng.uniform_below(span);
      offset -= static_cast<std::size_t>(spec.jitter);
    }
    const std::size_t src = i + offset;
    const double t = seq.rgb[i].timestamp;

    // The delayed stream keeps the reference timestamp: a consumer pairing
    // streams by time must actually see stale content, not re-align it away.
    if (spec.shifted == ShiftedStream::kRgb) {
      RgbFrame shifted = seq.rgb[src];
      shifted.timestamp = t;
      out.rgb.push_back(std::move(shifted));
      out.depth.push_back(seq.depth[i]);
    } else {
      DepthFrame shifted = seq.depth[src];
      shifted.timestamp = seq.depth[i].timestamp;
      out.depth.push_back(std::move(shifted));
      out.rgb.push_back(seq.rgb[i]);
    }
    poses.push_back(seq.trajectory.at(i));
  }
  out.trajectory = Trajectory(std::move(poses));
  return out;
}

}  // namespace pforge
