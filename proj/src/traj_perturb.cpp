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

#include "pforge/traj_perturb.hpp"

#include <cmath>

#include "pforge/geometry.hpp"

namespace pforge::traj {

namespace {

constexpr double kDegToRad = M_PI / 180.0;

void require_sigma(double sigma, const char* name) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw InvalidParameter(std::string(name) + " must be non-negative");
  }
}

}  // namespace

Pose perturb_pose_rotation(const Pose& pose, double sigma_deg, RngStream& rng) {
  require_sigma(sigma_deg, "rotation sigma");
  if (sigma_deg == 0.0) {
    return pose;
  }
  const double s = sigma_deg * kDegToRad;
  const double rx = s * rng.gaussian();
  const double ry = s * rng.gaussian();
  const double rz = s * rng.gaussian();
  const Eigen::Quaterniond delta = quat_from_euler_xyz(rx, ry, rz);
  return Pose(pose.timestamp, pose.position, pose.orientation * delta);
}

Pose perturb_pose_translation(const Pose& pose, double sigma_m,
                              RngStream& rng) {
  require_sigma(sigma_m, "translation sigma");
  if (sigma_m == 0.0) {
    return pose;
  }
  const Eigen::Vector3d noise(sigma_m * rng.gaussian(),
                              sigma_m * rng.gaussian(),
                              sigma_m * rng.gaussian());
  return Pose(pose.timestamp, pose.position + noise, pose.orientation);
}

namespace {

template <typename Fn>
Trajectory map_poses(const Trajectory& traj, Fn&& fn) {
  std::vector<Pose> out;
  out.reserve(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    out.push_back(fn(traj.at(i), static_cast<std::uint64_t>(i)));
  }
  return Trajectory(std::move(out));
}

}  // namespace

Trajectory perturb_rotation(const Trajectory& traj, double sigma_deg,
                            std::uint64_t seed) {
  return map_poses(traj, [&](const Pose& pose, std::uint64_t i) {
    RngStream rng(seed, i, kind_id(PerturbationKind::kRotationDeviation),
                  RngLane::kDraw);
    return perturb_pose_rotation(pose, sigma_deg, rng);
  });
}

Trajectory perturb_translation(const Trajectory& traj, double sigma_m,
                               std::uint64_t seed) {
  return map_poses(traj, [&](const Pose& pose, std::uint64_t i) {
    RngStream rng(seed, i, kind_id(PerturbationKind::kTranslationDeviation),
                  RngLane::kDraw);
    return perturb_pose_translation(pose, sigma_m, rng);
  });
}

Trajectory perturb_se3(const Trajectory& traj, double rot_sigma_deg,
                       double trans_sigma_m, std::uint64_t seed) {
  return perturb_translation(perturb_rotation(traj, rot_sigma_deg, seed),
                             trans_sigma_m, seed);
}

SensorSequence downsample_faster_motion(const SensorSequence& seq, int k) {
  if (k < 1) {
    throw InvalidParameter("faster-motion factor must be at least 1");
  }
  require_aligned(seq);
  const std::size_t n = seq.rgb.size();
  if (n == 0 || static_cast<std::size_t>(k) > n) {
    throw TooShort("sequence has fewer frames than the speed-up factor");
  }
  if (k == 1) {
    return seq;
  }
  SensorSequence out;
  std::vector<Pose> poses;
  for (std::size_t i = 0; i < n; i += static_cast<std::size_t>(k)) {
    out.rgb.push_back(seq.rgb[i]);
    out.depth.push_back(seq.depth[i]);
    poses.push_back(seq.trajectory.at(i));
  }
  out.trajectory = Trajectory(std::move(poses));
  return out;
}

std::vector<Eigen::Vector3d> perturb_extrinsic_baseline(
    const std::vector<Eigen::Vector3d>& baselines, const Eigen::Vector3d& axis,
    double sigma_m, std::uint64_t seed) {
  require_sigma(sigma_m, "baseline sigma");
  if (std::abs(axis.norm() - 1.0) > 1e-9) {
    throw InvalidParameter("baseline axis must be unit length");
  }
  std::vector<Eigen::Vector3d> out;
  out.reserve(baselines.size());
  for (std::size_t i = 0; i < baselines.size(); ++i) {
    RngStream rng(seed, static_cast<std::uint64_t>(i),
                  kind_id(PerturbationKind::kExtrinsicBaseline),
                  RngLane::kDraw);
    out.push_back(baselines[i] + sigma_m * rng.gaussian() * axis);
  }
  return out;
}

Trajectory apply_trajectory(const Trajectory& traj,
                            const PerturbationSpec& spec,
                            const SeverityTable& table) {
  spec.validate();
  const ParamSet& params = table.params(spec.kind, spec.severity);
  switch (spec.kind) {
    case PerturbationKind::kRotationDeviation:
      return perturb_rotation(traj, params.get("sigma_deg"), spec.seed);
    case PerturbationKind::kTranslationDeviation:
      return perturb_translation(traj, params.get("sigma_m"), spec.seed);
    default:
      throw KindMismatch(
          "apply_trajectory handles rotation and translation deviations only");
  }
}

}  // namespace pforge::traj
