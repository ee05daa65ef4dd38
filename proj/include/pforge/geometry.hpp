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

#ifndef PFORGE_GEOMETRY_HPP
#define PFORGE_GEOMETRY_HPP

#include <Eigen/Dense>
#include <Eigen/Geometry>

namespace pforge {

/// Returns q / |q|.  Throws InvalidQuaternion when |q| < 1e-12.
Eigen::Quaterniond normalize_quaternion(const Eigen::Quaterniond& q);

/// Unit quaternion to rotation matrix.  Throws InvalidQuaternion when the
/// norm is off by more than 1e-9.
Eigen::Matrix3d quat_to_rotmat(const Eigen::Quaterniond& q);

/// Flips the sign so qw >= 0; when qw == 0 the first nonzero of (qx,qy,qz)
/// is made positive.  Both q and -q encode the same rotation, this picks the
/// representative that serializes stably.
Eigen::Quaterniond canonical_quaternion(const Eigen::Quaterniond& q);

/// Rotation about x, then y, then z:  R = Rx(rx) * Ry(ry) * Rz(rz).
/// Angles in radians.
Eigen::Quaterniond quat_from_euler_xyz(double rx, double ry, double rz);

/// Inverse of quat_from_euler_xyz for |ry| < pi/2.  Returns (rx, ry, rz).
Eigen::Vector3d euler_xyz_from_rotmat(const Eigen::Matrix3d& m);

/// Geodesic distance between two rotations, in radians.
double rotation_angle_between(const Eigen::Quaterniond& a,
                              const Eigen::Quaterniond& b);

}  // namespace pforge

#endif  // PFORGE_GEOMETRY_HPP
