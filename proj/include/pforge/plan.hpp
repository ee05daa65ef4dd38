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

#ifndef PFORGE_PLAN_HPP
#define PFORGE_PLAN_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pforge/severity.hpp"

namespace pforge::plan {

enum class Category : std::uint8_t {
  kClean,
  kImage,
  kDepth,
  kFasterMotion,
  kTrajectory,
  kMisalignment,
};

std::string_view to_string(Category category);
Category parse_category(std::string_view name);

/// Severity selection for a trajectory entry: rotation-only,
/// translation-only, or both (combined).
struct TrajectoryRecipe {
  std::optional<SeverityLevel> rotation;
  std::optional<SeverityLevel> translation;

  bool operator==(const TrajectoryRecipe&) const = default;
};

/// Cross-sensor delay entry: the severity selects the frame interval, the
/// mode selects fixed (static) or per-frame jittered (dynamic) delay.
struct MisalignRecipe {
  PerturbationMode mode = PerturbationMode::kStatic;
  SeverityLevel severity = SeverityLevel::kMedium;

  bool operator==(const MisalignRecipe&) const = default;
};

/// One benchmark sequence recipe.  Exactly one payload is set, matching the
/// category; clean entries carry no payload.
struct PlanEntry {
  std::string id;     // unique path-like identifier, starts with the scene
  std::string scene;
  Category category = Category::kClean;
  std::uint64_t seed = 0;

  std::optional<PerturbationSpec> spec;          // image and depth entries
  std::optional<SeverityLevel> faster;           // faster-motion entries
  std::optional<TrajectoryRecipe> trajectory;    // trajectory entries
  std::optional<MisalignRecipe> misalignment;    // misalignment entries

  bool operator==(const PlanEntry&) const;
};

struct CategoryCounts {
  std::size_t clean = 0;
  std::size_t image = 0;
  std::size_t depth = 0;
  std::size_t faster_motion = 0;
  std::size_t trajectory = 0;
  std::size_t misalignment = 0;

  std::size_t total() const {
    return clean + image + depth + faster_motion + trajectory + misalignment;
  }
  bool operator==(const CategoryCounts&) const = default;
};

struct BenchmarkPlan {
  std::uint64_t master_seed = 0;
  std::vector<PlanEntry> entries;

  CategoryCounts counts() const;
  bool operator==(const BenchmarkPlan&) const = default;
};

/// Enumerates the full benchmark: per scene, 1 clean + 96 image (16 kinds x
/// 3 levels x static/dynamic) + 4 depth (medium) + 3 faster-motion + 15
/// trajectory (3 rotation + 3 translation + 3x3 combined) + 6 misalignment
/// (3 static + 3 dynamic) = 125 entries; eight scenes make 1,000.  Entry
/// seeds derive from (master seed, entry id) by hashing, so plans are
/// reproducible and distinct recipes get distinct seeds.  Pure function: no
/// filesystem access.  Throws PlanShapeError unless given exactly eight
/// distinct well-formed scene names.
BenchmarkPlan build_plan(const std::vector<std::string>& scenes,
                         std::uint64_t master_seed);

/// The seed derivation used by build_plan, exposed for tools that must
/// re-derive seeds under a different master seed.
std::uint64_t derive_entry_seed(std::uint64_t master_seed,
                                const std::string& entry_id);

/// Plan document serialization (schema "pforge-plan/1").  Serialization is
/// byte-deterministic; parsing rejects unknown or missing fields naming the
/// entry, throws SchemaError.
std::string plan_to_text(const BenchmarkPlan& plan);
BenchmarkPlan plan_from_text(const std::string& text);
void write_plan_file(const std::filesystem::path& path,
                     const BenchmarkPlan& plan);
BenchmarkPlan load_plan_file(const std::filesystem::path& path);

}  // namespace pforge::plan

#endif  // PFORGE_PLAN_HPP
