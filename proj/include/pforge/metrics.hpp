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

#ifndef PFORGE_METRICS_HPP
#define PFORGE_METRICS_HPP

#include <Eigen/Dense>
#include <cstddef>
#include <utility>
#include <vector>

#include "pforge/types.hpp"

namespace pforge::metrics {

using PointCloud = std::vector<Eigen::Vector3d>;

/// Matching window for timestamp association, in seconds.
inline constexpr double kAssociationTolerance = 0.02;

/// Scores charged to a run that lost tracking or produced no usable
/// estimate: worst-case trajectory error and zero scale ratio.
inline constexpr double kFailureAte = 1.0;
inline constexpr double kFailureSr = 0.0;

enum class Alignment { kNone, kRigid, kSimilarity };

/// Greedy nearest-timestamp matching of two ascending time series:
/// candidate pairs within `tolerance` seconds are taken in order of
/// ascending time difference, each element used at most once.  Returns
/// (a index, b index) pairs sorted by the first index; possibly empty.
std::vector<std::pair<std::size_t, std::size_t>> associate_series(
    const std::vector<double>& a, const std::vector<double>& b,
    double tolerance);

/// associate_series over pose timestamps.  Throws NoAssociations when
/// nothing matches.
std::vector<std::pair<std::size_t, std::size_t>> associate_timestamps(
    const Trajectory& estimate, const Trajectory& ground_truth,
    double tolerance = kAssociationTolerance);

/// dst ~= scale * rotation * src + translation, least squares.
struct SimilarityTransform {
  double scale = 1.0;
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Eigen::Vector3d apply(const Eigen::Vector3d& p) const {
    return scale * (rotation * p) + translation;
  }
};

/// Closed-form least-squares alignment of two paired point sets.  The
/// rotation is always proper (determinant +1); with_scale toggles the
/// similarity scale factor, otherwise scale is fixed at 1.  Needs at least
/// three pairs (TooShort) in a non-collinear configuration
/// (DegenerateGeometry).
SimilarityTransform umeyama_align(const PointCloud& src, const PointCloud& dst,
                                  bool with_scale);

struct AteReport {
  double ate = 0.0;                 // RMSE over matched positions, meters
  std::size_t pairs = 0;            // number of associated pose pairs
  Alignment alignment = Alignment::kNone;
  std::vector<double> errors;       // per-pair translation error, meters
};

/// Absolute trajectory error: associates the trajectories by timestamp,
/// optionally aligns the estimate onto the ground truth, and returns the
/// root-mean-square translation error.  Throws TooShort with fewer than two
/// matched pairs.
AteReport compute_ate(const Trajectory& estimate,
                      const Trajectory& ground_truth, Alignment alignment);

struct SrReport {
  double sr = 0.0;                  // estimated path length / true path length
  std::size_t pairs = 0;
};

/// Scale ratio of the estimated path length to the ground-truth path length
/// over the matched poses.  Throws DegenerateGroundTruth when the matched
/// ground-truth poses do not move.
SrReport compute_sr(const Trajectory& estimate,
                    const Trajectory& ground_truth);

/// Share of runs (in percent) whose ATE is at or below the threshold.
double compute_csr(const std::vector<double>& ates, double threshold);

/// Outcome of one benchmark setting for aggregation.
struct SettingResult {
  double ate = kFailureAte;
  double sr = kFailureSr;
  bool failed = true;
};

inline SettingResult failed_setting() { return SettingResult{}; }

struct AggregateReport {
  double mean_ate = 0.0;
  double max_ate = 0.0;
  double mean_sr = 0.0;
  double min_sr = 0.0;
  std::size_t failures = 0;
  std::size_t total = 0;
};

/// Mean/max ATE and mean/min SR over a batch of runs.  Failed runs enter
/// the statistics at the failure scores.
AggregateReport aggregate(const std::vector<SettingResult>& results);

struct ReconReport {
  double accuracy_m = 0.0;            // mean est->gt nearest distance
  double completeness_m = 0.0;        // mean gt->est nearest distance
  double completeness_ratio_pct = 0;  // share of gt within threshold
  double threshold_m = 0.0;
};

/// Point-cloud reconstruction quality against a ground-truth cloud.
/// Nearest-neighbor queries are exact; ties break toward the lower point
/// index, so results do not depend on traversal order.
ReconReport compute_recon_metrics(const PointCloud& estimate,
                                  const PointCloud& ground_truth,
                                  double threshold_m);

/// Exact nearest-neighbor distances from each query point to the target
/// cloud.  Exposed for oracle testing of the accelerated path.
std::vector<double> nearest_distances(const PointCloud& queries,
                                      const PointCloud& targets);

}  // namespace pforge::metrics

#endif  // PFORGE_METRICS_HPP
