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

#include "pforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "pforge/errors.hpp"

namespace pforge::metrics {

std::vector<std::pair<std::size_t, std::size_t>> associate_series(
    const std::vector<double>& a, const std::vector<double>& b,
    double tolerance) {
  if (!(tolerance > 0.0)) {
    throw InvalidParameter("association tolerance must be positive");
  }

  struct Candidate {
    double dt;
    std::size_t ia;
    std::size_t ib;
  };
  std::vector<Candidate> candidates;
  // Both series are time-sorted, so a sliding window finds every pair
  // within tolerance in linear-ish time.
  std::size_t lo = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double t = a[i];
    while (lo < b.size() && b[lo] < t - tolerance) {
      ++lo;
    }
    for (std::size_t j = lo; j < b.size(); ++j) {
      const double dt = b[j] - t;
      if (dt > tolerance) {
        break;
      }
      candidates.push_back({std::abs(dt), i, j});
    }
  }

  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& x, const Candidate& y) {
              if (x.dt != y.dt) return x.dt < y.dt;
              if (x.ia != y.ia) return x.ia < y.ia;
              return x.ib < y.ib;
            });

  std::vector<bool> a_used(a.size(), false);
  std::vector<bool> b_used(b.size(), false);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (const Candidate& c : candidates) {
    if (a_used[c.ia] || b_used[c.ib]) {
      continue;
    }
    a_used[c.ia] = true;
    b_used[c.ib] = true;
    pairs.emplace_back(c.ia, c.ib);
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

std::vector<std::pair<std::size_t, std::size_t>> associate_timestamps(
    const Trajectory& estimate, const Trajectory& ground_truth,
    double tolerance) {
  std::vector<double> est_times, gt_times;
  est_times.reserve(estimate.size());
  gt_times.reserve(ground_truth.size());
  for (std::size_t i = 0; i < estimate.size(); ++i) {
    est_times.push_back(estimate.at(i).timestamp);
  }
  for (std::size_t i = 0; i < ground_truth.size(); ++i) {
    gt_times.push_back(ground_truth.at(i).timestamp);
  }
  auto pairs = associate_series(est_times, gt_times, tolerance);
  if (pairs.empty()) {
    throw NoAssociations("no timestamp pairs within tolerance");
  }
  return pairs;
}

SimilarityTransform umeyama_align(const PointCloud& src, const PointCloud& dst,
                                  bool with_scale) {
  if (src.size() != dst.size()) {
    throw InvalidParameter("alignment needs equally sized point sets");
  }
  const std::size_t n = src.size();
  if (n < 3) {
    throw TooShort("alignment needs at least three point pairs");
  }

  Eigen::Vector3d mean_src = Eigen::Vector3d::Zero();
  Eigen::Vector3d mean_dst = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    mean_src += src[i];
    mean_dst += dst[i];
  }
  mean_src /= static_cast<double>(n);
  mean_dst /= static_cast<double>(n);

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  double var_src = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector3d x = src[i] - mean_src;
    const Eigen::Vector3d y = dst[i] - mean_dst;
    cov += y * x.transpose();
    var_src += x.squaredNorm();
  }
  cov /= static_cast<double>(n);
  var_src /= static_cast<double>(n);

  if (!(var_src > 0.0)) {
    throw DegenerateGeometry("source points are coincident");
  }

  Eigen::JacobiSVD<Eigen::Matrix3d> svd(
      cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector3d d = svd.singularValues();
  // A unique rotation needs rank >= 2: collinear point sets leave a free
  // rotation about the line.
  if (d(1) <= 1e-12 * std::max(1.0, d(0))) {
    throw DegenerateGeometry("point configuration is collinear");
  }

  Eigen::Vector3d s = Eigen::Vector3d::Ones();
  if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0.0) {
    s(2) = -1.0;  // reflection correction keeps the rotation proper
  }

  SimilarityTransform result;
  result.rotation =
      svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
  result.scale = with_scale ? d.dot(s) / var_src : 1.0;
  if (!(result.scale > 0.0) || !std::isfinite(result.scale)) {
    throw DegenerateGeometry("alignment scale collapsed");
  }
  result.translation = mean_dst - result.scale * (result.rotation * mean_src);
  return result;
}

AteReport compute_ate(const Trajectory& estimate,
                      const Trajectory& ground_truth, Alignment alignment) {
  const auto pairs = associate_timestamps(estimate, ground_truth,
                                          kAssociationTolerance);
  if (pairs.size() < 2) {
    throw TooShort("trajectory error needs at least two matched poses");
  }

  PointCloud est_pts, gt_pts;
  est_pts.reserve(pairs.size());
  gt_pts.reserve(pairs.size());
  for (const auto& [e, g] : pairs) {
    est_pts.push_back(estimate.at(e).position);
    gt_pts.push_back(ground_truth.at(g).position);
  }

  SimilarityTransform transform;  // identity when no alignment is requested
  if (alignment != Alignment::kNone) {
    transform =
        umeyama_align(est_pts, gt_pts, alignment == Alignment::kSimilarity);
  }

  AteReport report;
  report.alignment = alignment;
  report.pairs = pairs.size();
  report.errors.reserve(pairs.size());
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < est_pts.size(); ++i) {
    const double err = (transform.apply(est_pts[i]) - gt_pts[i]).norm();
    report.errors.push_back(err);
    sum_sq += err * err;
  }
  report.ate = std::sqrt(sum_sq / static_cast<double>(est_pts.size()));
  return report;
}

SrReport compute_sr(const Trajectory& estimate,
                    const Trajectory& ground_truth) {
  const auto pairs = associate_timestamps(estimate, ground_truth,
                                          kAssociationTolerance);
  if (pairs.size() < 2) {
    throw TooShort("scale ratio needs at least two matched poses");
  }
  double est_len = 0.0;
  double gt_len = 0.0;
  for (std::size_t i = 1; i < pairs.size(); ++i) {
    est_len += (estimate.at(pairs[i].first).position -
                estimate.at(pairs[i - 1].first).position)
                   .norm();
    gt_len += (ground_truth.at(pairs[i].second).position -
               ground_truth.at(pairs[i - 1].second).position)
                  .norm();
  }
  if (!(gt_len > 0.0)) {
    throw DegenerateGroundTruth("matched ground-truth path has zero length");
  }
  SrReport report;
  report.pairs = pairs.size();
  report.sr = est_len / gt_len;
  return report;
}

double compute_csr(const std::vector<double>& ates, double threshold) {
  if (ates.empty()) {
    throw EmptyInput("success rate needs at least one run");
  }
  if (!(threshold > 0.0)) {
    throw InvalidParameter("success threshold must be positive");
  }
  std::size_t ok = 0;
  for (double ate : ates) {
    if (ate <= threshold) {
      ++ok;
    }
  }
  return 100.0 * static_cast<double>(ok) / static_cast<double>(ates.size());
}

AggregateReport aggregate(const std::vector<SettingResult>& results) {
  if (results.empty()) {
    throw EmptyInput("aggregate needs at least one run");
  }
  AggregateReport report;
  report.total = results.size();
  report.max_ate = -std::numeric_limits<double>::infinity();
  report.min_sr = std::numeric_limits<double>::infinity();
  double ate_sum = 0.0;
  double sr_sum = 0.0;
  for (const SettingResult& r : results) {
    const double ate = r.failed ? kFailureAte : r.ate;
    const double sr = r.failed ? kFailureSr : r.sr;
    ate_sum += ate;
    sr_sum += sr;
    report.max_ate = std::max(report.max_ate, ate);
    report.min_sr = std::min(report.min_sr, sr);
    report.failures += r.failed ? 1 : 0;
  }
  report.mean_ate = ate_sum / static_cast<double>(results.size());
  report.mean_sr = sr_sum / static_cast<double>(results.size());
  return report;
}

namespace {

struct CellKey {
  long x, y, z;
  bool operator==(const CellKey& other) const = default;
};

struct CellHash {
  std::size_t operator()(const CellKey& k) const {
    std::size_t h = static_cast<std::size_t>(k.x) * 73856093u;
    h ^= static_cast<std::size_t>(k.y) * 19349663u;
    h ^= static_cast<std::size_t>(k.z) * 83492791u;
    return h;
  }
};

/// Exact nearest neighbor over a uniform grid.  Rings of cells are scanned
/// outward; the search stops once the nearest possible point in the next
/// ring is farther than the best hit so far.
class GridIndex {
 public:
  explicit GridIndex(const PointCloud& points) : points_(points) {
    Eigen::Vector3d lo = points[0], hi = points[0];
    for (const auto& p : points) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    const double extent = (hi - lo).maxCoeff();
    const double per_axis =
        std::cbrt(static_cast<double>(points.size()));
    cell_ = std::max(extent / std::max(per_axis, 1.0), 1e-9);
    lo_cell_ = key_of(lo);
    hi_cell_ = key_of(hi);
    for (std::size_t i = 0; i < points.size(); ++i) {
      cells_[key_of(points[i])].push_back(i);
    }
  }

  std::pair<double, std::size_t> nearest(const Eigen::Vector3d& q) const {
    const CellKey center = key_of(q);
    // Past this ring every occupied cell has been visited, so the scan is
    // guaranteed to have found something.
    const long last_ring =
        std::max({std::labs(center.x - lo_cell_.x),
                  std::labs(center.x - hi_cell_.x),
                  std::labs(center.y - lo_cell_.y),
                  std::labs(center.y - hi_cell_.y),
                  std::labs(center.z - lo_cell_.z),
                  std::labs(center.z - hi_cell_.z)});

    double best_d2 = std::numeric_limits<double>::infinity();
    std::size_t best_idx = 0;
    for (long ring = 0; ring <= last_ring || std::isfinite(best_d2); ++ring) {
      if (std::isfinite(best_d2)) {
        // Points in ring r are at least (r-1) * cell away from q.
        const double reach = (static_cast<double>(ring) - 1.0) * cell_;
        if (reach > 0.0 && reach * reach > best_d2) {
          break;
        }
      }
      visit_ring(center, ring, [&](const CellKey& key) {
        auto it = cells_.find(key);
        if (it == cells_.end()) {
          return;
        }
        for (std::size_t idx : it->second) {
          const double d2 = (points_[idx] - q).squaredNorm();
          if (d2 < best_d2 || (d2 == best_d2 && idx < best_idx)) {
            best_d2 = d2;
            best_idx = idx;
          }
        }
      });
    }
    return {std::sqrt(best_d2), best_idx};
  }

 private:
  CellKey key_of(const Eigen::Vector3d& p) const {
    return CellKey{static_cast<long>(std::floor(p.x() / cell_)),
                   static_cast<long>(std::floor(p.y() / cell_)),
                   static_cast<long>(std::floor(p.z() / cell_))};
  }

  template <typename Fn>
  void visit_ring(const CellKey& c, long r, Fn&& fn) const {
    if (r == 0) {
      fn(c);
      return;
    }
    for (long dz = -r; dz <= r; ++dz) {
      for (long dy = -r; dy <= r; ++dy) {
        for (long dx = -r; dx <= r; ++dx) {
          if (std::max({std::labs(dx), std::labs(dy), std::labs(dz)}) != r) {
            continue;
          }
          fn(CellKey{c.x + dx, c.y + dy, c.z + dz});
        }
      }
    }
  }

  const PointCloud& points_;
  double cell_ = 1.0;
  CellKey lo_cell_{0, 0, 0};
  CellKey hi_cell_{0, 0, 0};
  std::unordered_map<CellKey, std::vector<std::size_t>, CellHash> cells_;
};

}  // namespace

std::vector<double> nearest_distances(const PointCloud& queries,
                                      const PointCloud& targets) {
  if (queries.empty() || targets.empty()) {
    throw EmptyInput("nearest-neighbor search needs non-empty clouds");
  }
  std::vector<double> out;
  out.reserve(queries.size());
  if (targets.size() <= 64) {
    // Grid overhead is not worth it for tiny clouds.
    for (const auto& q : queries) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& t : targets) {
        best = std::min(best, (t - q).squaredNorm());
      }
      out.push_back(std::sqrt(best));
    }
    return out;
  }
  GridIndex index(targets);
  for (const auto& q : queries) {
    out.push_back(index.nearest(q).first);
  }
  return out;
}

ReconReport compute_recon_metrics(const PointCloud& estimate,
                                  const PointCloud& ground_truth,
                                  double threshold_m) {
  if (estimate.empty() || ground_truth.empty()) {
    throw EmptyInput("reconstruction metrics need non-empty clouds");
  }
  if (!(threshold_m > 0.0)) {
    throw InvalidParameter("completeness threshold must be positive");
  }

  const std::vector<double> est_to_gt =
      nearest_distances(estimate, ground_truth);
  const std::vector<double> gt_to_est =
      nearest_distances(ground_truth, estimate);

  ReconReport report;
  report.threshold_m = threshold_m;
  double acc = 0.0;
  for (double d : est_to_gt) {
    acc += d;
  }
  report.accuracy_m = acc / static_cast<double>(est_to_gt.size());

  double comp = 0.0;
  std::size_t within = 0;
  for (double d : gt_to_est) {
    comp += d;
    within += d <= threshold_m ? 1 : 0;
  }
  report.completeness_m = comp / static_cast<double>(gt_to_est.size());
  report.completeness_ratio_pct = 100.0 * static_cast<double>(within) /
                                  static_cast<double>(gt_to_est.size());
  return report;
}

}  // namespace pforge::metrics
