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

#include <cmath>
#include <cstddef>
#include <vector>

#include <doctest.h>

#include "pforge/errors.hpp"
#include "pforge/misalign.hpp"
#include "pforge/rng.hpp"
#include "pforge/severity.hpp"
#include "pforge/types.hpp"

using namespace pforge;

namespace {

/// Frames carry their source index in a pixel so shifts are observable.
SensorSequence tagged_sequence(std::size_t n) {
  SensorSequence seq;
  std::vector<Pose> poses;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 0.1 * static_cast<double>(i);
    RgbFrame rgb(t, 2, 2);
    rgb.value(0, 0, 0) = static_cast<float>(i);
    DepthFrame depth(t, 2, 2);
    depth.value(0, 0) = static_cast<float>(i);
    seq.rgb.push_back(std::move(rgb));
    seq.depth.push_back(std::move(depth));
    poses.emplace_back(t, Eigen::Vector3d(static_cast<double>(i), 0.0, 0.0),
                       Eigen::Quaterniond::Identity());
  }
  seq.trajectory = Trajectory(std::move(poses));
  return seq;
}

std::size_t rgb_tag(const SensorSequence& seq, std::size_t i) {
  return static_cast<std::size_t>(seq.rgb[i].value(0, 0, 0));
}

}  // namespace

TEST_CASE("misalignment spec validation") {
  MisalignSpec spec;
  spec.delay_frames = -1;
  CHECK_THROWS_AS(spec.validate(), InvalidParameter);
  spec.delay_frames = 3;
  spec.jitter = -1;
  CHECK_THROWS_AS(spec.validate(), InvalidParameter);
  spec.jitter = 4;  // beyond delay
  CHECK_THROWS_AS(spec.validate(), InvalidParameter);
  spec.jitter = 3;
  CHECK_NOTHROW(spec.validate());
}

TEST_CASE("static delay shifts color content but not the timeline") {
  const SensorSequence seq = tagged_sequence(10);
  MisalignSpec spec;
  spec.delay_frames = 3;
  spec.shifted = ShiftedStream::kRgb;

  const SensorSequence out = apply_misalignment(seq, spec);
  REQUIRE(out.rgb.size() == 7);
  REQUIRE(out.depth.size() == 7);
  REQUIRE(out.trajectory.size() == 7);

  for (std::size_t i = 0; i < 7; ++i) {
    // Color content is stale by exactly the delay...
    CHECK(rgb_tag(out, i) == i + 3);
    // ...but wears the reference timestamp.
    CHECK(out.rgb[i].timestamp == seq.rgb[i].timestamp);
    // Depth and ground truth stay on the reference timeline untouched.
    CHECK(out.depth[i].timestamp == seq.depth[i].timestamp);
    CHECK(out.depth[i].value(0, 0) == static_cast<float>(i));
    CHECK(out.trajectory.at(i).timestamp == seq.trajectory.at(i).timestamp);
    CHECK(out.trajectory.at(i).position.x() == static_cast<double>(i));
  }
}

TEST_CASE("static delay can shift the depth stream instead") {
  const SensorSequence seq = tagged_sequence(10);
  MisalignSpec spec;
  spec.delay_frames = 2;
  spec.shifted = ShiftedStream::kDepth;

  const SensorSequence out = apply_misalignment(seq, spec);
  REQUIRE(out.rgb.size() == 8);
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(out.depth[i].value(0, 0) == static_cast<float>(i + 2));
    CHECK(out.depth[i].timestamp == seq.depth[i].timestamp);
    CHECK(rgb_tag(out, i) == i);
    CHECK(out.rgb[i].timestamp == seq.rgb[i].timestamp);
  }
}

TEST_CASE("delay consuming the whole sequence is rejected") {
  const SensorSequence seq = tagged_sequence(10);
  MisalignSpec spec;

  spec.delay_frames = 10;
  CHECK_THROWS_AS(apply_misalignment(seq, spec), DelayExceedsSequence);

  spec.delay_frames = 7;
  spec.jitter = 3;  // reach = 10 = length
  CHECK_THROWS_AS(apply_misalignment(seq, spec), DelayExceedsSequence);

  spec.delay_frames = 9;
  spec.jitter = 0;  // reach = 9 < 10: one frame survives
  const SensorSequence out = apply_misalignment(seq, spec);
  REQUIRE(out.rgb.size() == 1);
  CHECK(rgb_tag(out, 0) == 9);
}

TEST_CASE("jittered delay draws offsets from the documented stream") {
  const int delay = 5;
  const int jitter = 2;
  const std::size_t n = 3000 + static_cast<std::size_t>(delay + jitter);
  const SensorSequence seq = tagged_sequence(n);

  MisalignSpec spec;
  spec.delay_frames = delay;
  spec.jitter = jitter;
  spec.seed = 2024;
  const SensorSequence out = apply_misalignment(seq, spec);
  REQUIRE(out.rgb.size() == n - 7);

  std::vector<std::size_t> counts(2 * jitter + 1, 0);
  for (std::size_t i = 0; i < out.rgb.size(); ++i) {
    const std::size_t offset = rgb_tag(out, i) - i;
    REQUIRE(offset >= static_cast<std::size_t>(delay - jitter));
    REQUIRE(offset <= static_cast<std::size_t>(delay + jitter));

    RngStream rng(spec.seed, static_cast<std::uint64_t>(i),
                  kind_id(PerturbationKind::kSensorMisalignment),
                  RngLane::kOffset);
    const std::size_t expected =
        static_cast<std::size_t>(delay - jitter) +
        rng.uniform_below(2ull * jitter + 1ull);
    CHECK(offset == expected);
    ++counts[offset - static_cast<std::size_t>(delay - jitter)];
  }
  // Offsets are uniform over five values: each within 6 binomial sigmas.
  const double p = 1.0 / 5.0;
  const double mean = p * static_cast<double>(out.rgb.size());
  const double band =
      6.0 * std::sqrt(static_cast<double>(out.rgb.size()) * p * (1.0 - p));
  for (std::size_t c : counts) {
    CHECK(std::abs(static_cast<double>(c) - mean) < band);
  }
}

TEST_CASE("static misalignment ignores the seed") {
  const SensorSequence seq = tagged_sequence(12);
  MisalignSpec a;
  a.delay_frames = 4;
  a.seed = 1;
  MisalignSpec b = a;
  b.seed = 999;
  const SensorSequence out_a = apply_misalignment(seq, a);
  const SensorSequence out_b = apply_misalignment(seq, b);
  REQUIRE(out_a.rgb.size() == out_b.rgb.size());
  for (std::size_t i = 0; i < out_a.rgb.size(); ++i) {
    CHECK(rgb_tag(out_a, i) == rgb_tag(out_b, i));
  }
}

TEST_CASE("jittered misalignment reproduces with the seed") {
  const SensorSequence seq = tagged_sequence(60);
  MisalignSpec spec;
  spec.delay_frames = 4;
  spec.jitter = 2;
  spec.seed = 5;

  const SensorSequence a = apply_misalignment(seq, spec);
  const SensorSequence b = apply_misalignment(seq, spec);
  REQUIRE(a.rgb.size() == b.rgb.size());
  bool all_same = true;
  for (std::size_t i = 0; i < a.rgb.size(); ++i) {
    if (rgb_tag(a, i) != rgb_tag(b, i)) all_same = false;
  }
  CHECK(all_same);

  spec.seed = 6;
  const SensorSequence c = apply_misalignment(seq, spec);
  bool any_differs = false;
  for (std::size_t i = 0; i < a.rgb.size(); ++i) {
    if (rgb_tag(a, i) != rgb_tag(c, i)) any_differs = true;
  }
  CHECK(any_differs);
}

TEST_CASE("misalignment requires an aligned sequence") {
  SensorSequence seq = tagged_sequence(10);
  seq.depth.pop_back();
  MisalignSpec spec;
  spec.delay_frames = 1;
  CHECK_THROWS_AS(apply_misalignment(seq, spec), InvalidParameter);
}
