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

#ifndef PFORGE_TYPES_HPP
#define PFORGE_TYPES_HPP

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <cstddef>
#include <vector>

#include "pforge/errors.hpp"

namespace pforge {

/// A timestamped camera-to-world pose.  The quaternion is kept unit-norm:
/// the constructor renormalizes when the norm is off by more than 1e-12 and
/// rejects near-zero quaternions outright.
struct Pose {
  double timestamp = 0.0;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();

  Pose() = default;
  Pose(double t, const Eigen::Vector3d& p, const Eigen::Quaterniond& q);
};

/// An ordered pose sequence with strictly increasing timestamps.
class Trajectory {
 public:
  Trajectory() = default;
  /// Throws InvalidParameter when timestamps are not strictly increasing.
  explicit Trajectory(std::vector<Pose> poses);

  const std::vector<Pose>& poses() const { return poses_; }
  const Pose& at(std::size_t i) const { return poses_.at(i); }
  std::size_t size() const { return poses_.size(); }
  bool empty() const { return poses_.empty(); }

 private:
  std::vector<Pose> poses_;
};

/// RGB image in [0,1] floats, row-major, three interleaved channels.
struct RgbFrame {
  double timestamp = 0.0;
  int width = 0;
  int height = 0;
  std::vector<float> pixels;  // size == width * height * 3

  RgbFrame() = default;
  RgbFrame(double t, int w, int h);  // zero-filled
  RgbFrame(double t, int w, int h, std::vector<float> px);

  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  float value(int x, int y, int c) const {
    return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c];
  }
  float& value(int x, int y, int c) {
    return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c];
  }
};

/// Depth image in meters.  A depth of zero is the VOID sentinel: no
/// measurement.  Perturbations never turn VOID back into a reading.
struct DepthFrame {
  static constexpr float kVoid = 0.0f;

  double timestamp = 0.0;
  int width = 0;
  int height = 0;
  std::vector<float> depths;  // size == width * height

  DepthFrame() = default;
  DepthFrame(double t, int w, int h);  // VOID-filled
  DepthFrame(double t, int w, int h, std::vector<float> d);

  static bool is_void(float d) { return !(d > 0.0f); }

  float value(int x, int y) const {
    return depths[static_cast<std::size_t>(y) * width + x];
  }
  float& value(int x, int y) {
    return depths[static_cast<std::size_t>(y) * width + x];
  }
};

/// One captured sequence: RGB stream, depth stream, and ground-truth
/// trajectory.  Streams are aligned when the i-th element of each carries the
/// same timestamp.
struct SensorSequence {
  std::vector<RgbFrame> rgb;
  std::vector<DepthFrame> depth;
  Trajectory trajectory;
};

/// Throws InvalidParameter unless rgb, depth, and trajectory have equal
/// length and elementwise matching timestamps (within 1e-9 s).
void require_aligned(const SensorSequence& seq);

inline float clamp01(float v) { return v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v); }

}  // namespace pforge

#endif  // PFORGE_TYPES_HPP
