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

#ifndef PFORGE_TRAJ_PERTURB_HPP
#define PFORGE_TRAJ_PERTURB_HPP

#include <cstdint>
#include <vector>

#include "pforge/rng.hpp"
#include "pforge/severity.hpp"
#include "pforge/types.hpp"

namespace pforge::traj {

/// Right-multiplies the orientation by a small random rotation whose x, y, z
/// Euler angles are each N(0, sigma_deg^2) degrees.  The rotation is applied
/// in the pose's local frame; position and timestamp are untouched.
/// sigma_deg == 0 keeps the pose bit for bit.
Pose perturb_pose_rotation(const Pose& pose, double sigma_deg, RngStream& rng);

/// Adds N(0, sigma_m^2 I3) meters to the position.  Orientation and
/// timestamp are untouched.
Pose perturb_pose_translation(const Pose& pose, double sigma_m, RngStream& rng);

/// Applies perturb_pose_rotation to every pose, with the random stream keyed
/// by (seed, pose index), so any subset of poses can be reproduced
/// independently.
Trajectory perturb_rotation(const Trajectory& traj, double sigma_deg,
                            std::uint64_t seed);

Trajectory perturb_translation(const Trajectory& traj, double sigma_m,
                               std::uint64_t seed);

/// Rotation deviation followed by translation deviation.  The two stages
/// draw from independent streams, so the combined result equals running
/// perturb_rotation and perturb_translation in sequence with the same seed.
Trajectory perturb_se3(const Trajectory& traj, double rot_sigma_deg,
                       double trans_sigma_m, std::uint64_t seed);

/// Simulates k-times faster motion by keeping frames {0, k, 2k, ...} of an
/// aligned sequence.  Kept frames retain their original timestamps and
/// poses.  k == 1 returns the input unchanged; k must not exceed the frame
/// count (TooShort otherwise).
SensorSequence downsample_faster_motion(const SensorSequence& seq, int k);

/// Shifts a stereo baseline vector: t' = t + eta * axis with eta drawn
/// N(0, sigma_m^2) once per pose from (seed, index).  `axis` must be unit
/// length within 1e-9.
std::vector<Eigen::Vector3d> perturb_extrinsic_baseline(
    const std::vector<Eigen::Vector3d>& baselines, const Eigen::Vector3d& axis,
    double sigma_m, std::uint64_t seed);

/// Applies a trajectory-kind spec (rotation/translation deviation) to a
/// trajectory.  Faster motion operates on whole sequences, not bare
/// trajectories, so it is rejected here with KindMismatch.
Trajectory apply_trajectory(const Trajectory& traj,
                            const PerturbationSpec& spec,
                            const SeverityTable& table);

}  // namespace pforge::traj

#endif  // PFORGE_TRAJ_PERTURB_HPP
