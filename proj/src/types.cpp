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

#include "pforge/types.hpp"

#include <cmath>
#include <cstdio>
#include <utility>

#include "pforge/geometry.hpp"

namespace pforge {

Pose::Pose(double t, const Eigen::Vector3d& p, const Eigen::Quaterniond& q)
    : timestamp(t), position(p), orientation(q) {
  const double n = q.norm();
  if (!(n > 1e-12) || !std::isfinite(n)) {
    throw InvalidQuaternion("pose quaternion has near-zero or non-finite norm");
  }
  // Renormalize only when actually off: repeated construction from an
  // already-unit quaternion must not drift bits.
  if (std::abs(n - 1.0) > 1e-12) {
    orientation = normalize_quaternion(q);
  }
}

Trajectory::Trajectory(std::vector<Pose> poses) : poses_(std::move(poses)) {
  for (std::size_t i = 1; i < poses_.size(); ++i) {
    if (!(poses_[i].timestamp > poses_[i - 1].timestamp)) {
      char buf[128];
      std::snprintf(buf, sizeof(buf),
                    "trajectory timestamps not strictly increasing at index %zu",
                    i);
      throw InvalidParameter(buf);
    }
  }
}

namespace {

void check_dims(int w, int h, std::size_t got, std::size_t per_pixel,
                const char* what) {
  if (w < 0 || h < 0) {
    throw InvalidParameter(std::string(what) + " has negative dimensions");
  }
  const std::size_t want =
      static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * per_pixel;
  if (got != want) {
    throw InvalidParameter(std::string(what) +
                           " buffer size does not match dimensions");
  }
}

}  // namespace

RgbFrame::RgbFrame(double t, int w, int h)
    : RgbFrame(t, w, h,
               std::vector<float>(
                   static_cast<std::size_t>(w < 0 ? 0 : w) *
                       static_cast<std::size_t>(h < 0 ? 0 : h) * 3,
                   0.0f)) {}

RgbFrame::RgbFrame(double t, int w, int h, std::vector<float> px)
    : timestamp(t), width(w), height(h), pixels(std::move(px)) {
  check_dims(w, h, pixels.size(), 3, "rgb frame");
}

DepthFrame::DepthFrame(double t, int w, int h)
    : DepthFrame(t, w, h,
                 std::vector<float>(
                     static_cast<std::size_t>(w < 0 ? 0 : w) *
                         static_cast<std::size_t>(h < 0 ? 0 : h),
                     kVoid)) {}

DepthFrame::DepthFrame(double t, int w, int h, std::vector<float> d)
    : timestamp(t), width(w), height(h), depths(std::move(d)) {
  check_dims(w, h, depths.size(), 1, "depth frame");
}

void require_aligned(const SensorSequence& seq) {
  const std::size_t n = seq.rgb.size();
  if (seq.depth.size() != n || seq.trajectory.size() != n) {
    throw InvalidParameter("sequence streams have mismatched lengths");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double t = seq.rgb[i].timestamp;
    if (std::abs(seq.depth[i].timestamp - t) > 1e-9 ||
        std::abs(seq.trajectory.at(i).timestamp - t) > 1e-9) {
      throw InvalidParameter("sequence streams have mismatched timestamps");
    }
  }
}

}  // namespace pforge
