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

#include "pforge/geometry.hpp"

#include <cmath>

#include "pforge/errors.hpp"

namespace pforge {

Eigen::Quaterniond normalize_quaternion(const Eigen::Quaterniond& q) {
  const double n = q.norm();
  if (!(n > 1e-12) || !std::isfinite(n)) {
    throw InvalidQuaternion("cannot normalize a near-zero quaternion");
  }
  return Eigen::Quaterniond(q.w() / n, q.x() / n, q.y() / n, q.z() / n);
}

Eigen::Matrix3d quat_to_rotmat(const Eigen::Quaterniond& q) {
  if (std::abs(q.norm() - 1.0) > 1e-9) {
    throw InvalidQuaternion("rotation requires a unit quaternion");
  }
  return q.toRotationMatrix();
}

Eigen::Quaterniond canonical_quaternion(const Eigen::Quaterniond& q) {
  bool flip = q.w() < 0.0;
  if (q.w() == 0.0) {
    if (q.x() != 0.0) {
      flip = q.x() < 0.0;
    } else if (q.y() != 0.0) {
      flip = q.y() < 0.0;
    } else {
      flip = q.z() < 0.0;
    }
  }
  return flip ? Eigen::Quaterniond(-q.w(), -q.x(), -q.y(), -q.z()) : q;
}

Eigen::Quaterniond quat_from_euler_xyz(double rx, double ry, double rz) {
  const Eigen::Quaterniond qx(Eigen::AngleAxisd(rx, Eigen::Vector3d::UnitX()));
  const Eigen::Quaterniond qy(Eigen::AngleAxisd(ry, Eigen::Vector3d::UnitY()));
  const Eigen::Quaterniond qz(Eigen::AngleAxisd(rz, Eigen::Vector3d::UnitZ()));
  return (qx * qy * qz).normalized();
}

Eigen::Vector3d euler_xyz_from_rotmat(const Eigen::Matrix3d& m) {
  // R = Rx * Ry * Rz puts sin(ry) at m(0,2).  Valid away from ry = +-pi/2.
  const double sy = std::min(1.0, std::max(-1.0, m(0, 2)));
  const double ry = std::asin(sy);
  const double rx = std::atan2(-m(1, 2), m(2, 2));
  const double rz = std::atan2(-m(0, 1), m(0, 0));
  return {rx, ry, rz};
}

double rotation_angle_between(const Eigen::Quaterniond& a,
                              const Eigen::Quaterniond& b) {
  const double d = std::min(1.0, std::abs(a.dot(b)));
  return 2.0 * std::acos(d);
}

}  // namespace pforge
