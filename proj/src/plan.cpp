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

#include "pforge/plan.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pforge/digest.hpp"
#include "pforge/errors.hpp"

namespace pforge::plan {

namespace {

using Json = nlohmann::ordered_json;

constexpr std::string_view kPlanSchema = "pforge-plan/1";

constexpr PerturbationMode kAllModes[] = {PerturbationMode::kStatic,
                                          PerturbationMode::kDynamic};

bool scene_name_ok(const std::string& scene) {
  if (scene.empty() || scene == "." || scene == "..") {
    return false;
  }
  for (char c : scene) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '.' || c == '_' ||
                    c == '-';
    if (!ok) {
      return false;
    }
  }
  return true;
}

bool specs_equal(const std::optional<PerturbationSpec>& a,
                 const std::optional<PerturbationSpec>& b) {
  if (a.has_value() != b.has_value()) {
    return false;
  }
  if (!a.has_value()) {
    return true;
  }
  return a->kind == b->kind && a->severity == b->severity &&
         a->mode == b->mode && a->seed == b->seed;
}

}  // namespace

bool PlanEntry::operator==(const PlanEntry& other) const {
  return id == other.id && scene == other.scene &&
         category == other.category && seed == other.seed &&
         specs_equal(spec, other.spec) && faster == other.faster &&
         trajectory == other.trajectory &&
         misalignment == other.misalignment;
}

std::string_view to_string(Category category) {
  switch (category) {
    case Category::kClean: return "clean";
    case Category::kImage: return "image";
    case Category::kDepth: return "depth";
    case Category::kFasterMotion: return "faster_motion";
    case Category::kTrajectory: return "trajectory";
    case Category::kMisalignment: return "misalignment";
  }
  throw InvalidParameter("unknown category value");
}

Category parse_category(std::string_view name) {
  for (Category c : {Category::kClean, Category::kImage, Category::kDepth,
                     Category::kFasterMotion, Category::kTrajectory,
                     Category::kMisalignment}) {
    if (to_string(c) == name) {
      return c;
    }
  }
  throw SchemaError("unknown category '" + std::string(name) + "'");
}

CategoryCounts BenchmarkPlan::counts() const {
  CategoryCounts c;
  for (const PlanEntry& e : entries) {
    switch (e.category) {
      case Category::kClean: ++c.clean; break;
      case Category::kImage: ++c.image; break;
      case Category::kDepth: ++c.depth; break;
      case Category::kFasterMotion: ++c.faster_motion; break;
      case Category::kTrajectory: ++c.trajectory; break;
      case Category::kMisalignment: ++c.misalignment; break;
    }
  }
  return c;
}

std::uint64_t derive_entry_seed(std::uint64_t master_seed,
                                const std::string& entry_id) {
  std::ostringstream canonical;
  canonical << kPlanSchema << '|' << master_seed << '|' << entry_id;
  return seed_from_text(canonical.str());
}

BenchmarkPlan build_plan(const std::vector<std::string>& scenes,
                         std::uint64_t master_seed) {
  if (scenes.size() != 8) {
    std::ostringstream msg;
    msg << "expected exactly 8 scenes, got " << scenes.size();
    throw PlanShapeError(msg.str());
  }
  std::set<std::string> distinct;
  for (const std::string& scene : scenes) {
    if (!scene_name_ok(scene)) {
      throw PlanShapeError("scene name '" + scene +
                           "' must be non-empty [A-Za-z0-9._-] text");
    }
    if (!distinct.insert(scene).second) {
      throw PlanShapeError("duplicate scene name '" + scene + "'");
    }
  }

  BenchmarkPlan plan;
  plan.master_seed = master_seed;

  auto add = [&](PlanEntry entry) {
    entry.seed = derive_entry_seed(master_seed, entry.id);
    if (entry.spec.has_value()) {
      entry.spec->seed = entry.seed;
    }
    plan.entries.push_back(std::move(entry));
  };

  for (const std::string& scene : scenes) {
    // 1. The unperturbed reference sequence.
    {
      PlanEntry e;
      e.scene = scene;
      e.category = Category::kClean;
      e.id = scene + "/clean";
      add(std::move(e));
    }

    // 2. Image perturbations: every kind x level x mode.
    for (int k = 0; k < kPerturbationKindCount; ++k) {
      const auto kind = static_cast<PerturbationKind>(k);
      if (!kind_is_rgb(kind)) {
        continue;
      }
      for (SeverityLevel level : kAllLevels) {
        for (PerturbationMode mode : kAllModes) {
          PlanEntry e;
          e.scene = scene;
          e.category = Category::kImage;
          e.id = scene + "/rgb/" + std::string(pforge::to_string(kind)) +
                 "/" + std::string(pforge::to_string(level)) + "/" +
                 std::string(pforge::to_string(mode));
          PerturbationSpec spec;
          spec.kind = kind;
          spec.severity = level;
          spec.mode = mode;
          e.spec = spec;
          add(std::move(e));
        }
      }
    }

    // 3. Depth perturbations: one configured severity per kind.
    for (int k = 0; k < kPerturbationKindCount; ++k) {
      const auto kind = static_cast<PerturbationKind>(k);
      if (!kind_is_depth(kind)) {
        continue;
      }
      PlanEntry e;
      e.scene = scene;
      e.category = Category::kDepth;
      e.id = scene + "/depth/" + std::string(pforge::to_string(kind)) +
             "/medium";
      PerturbationSpec spec;
      spec.kind = kind;
      spec.severity = SeverityLevel::kMedium;
      spec.mode = PerturbationMode::kStatic;
      e.spec = spec;
      add(std::move(e));
    }

    // 4. Faster motion at each level.
    for (SeverityLevel level : kAllLevels) {
      PlanEntry e;
      e.scene = scene;
      e.category = Category::kFasterMotion;
      e.id = scene + "/faster_motion/" +
             std::string(pforge::to_string(level));
      e.faster = level;
      add(std::move(e));
    }

    // 5. Trajectory deviations: rotation, translation, then the 3x3
    //    combined grid in rotation-major order.
    for (SeverityLevel level : kAllLevels) {
      PlanEntry e;
      e.scene = scene;
      e.category = Category::kTrajectory;
      e.id = scene + "/trajectory/rotation/" +
             std::string(pforge::to_string(level));
      e.trajectory = TrajectoryRecipe{level, std::nullopt};
      add(std::move(e));
    }
    for (SeverityLevel level : kAllLevels) {
      PlanEntry e;
      e.scene = scene;
      e.category = Category::kTrajectory;
      e.id = scene + "/trajectory/translation/" +
             std::string(pforge::to_string(level));
      e.trajectory = TrajectoryRecipe{std::nullopt, level};
      add(std::move(e));
    }
    for (SeverityLevel rot : kAllLevels) {
      for (SeverityLevel trans : kAllLevels) {
        PlanEntry e;
        e.scene = scene;
        e.category = Category::kTrajectory;
        e.id = scene + "/trajectory/combined/" +
               std::string(pforge::to_string(rot)) + "-" +
               std::string(pforge::to_string(trans));
        e.trajectory = TrajectoryRecipe{rot, trans};
        add(std::move(e));
      }
    }

    // 6. Cross-sensor misalignment: static then dynamic delays.
    for (PerturbationMode mode : kAllModes) {
      for (SeverityLevel level : kAllLevels) {
        PlanEntry e;
        e.scene = scene;
        e.category = Category::kMisalignment;
        e.id = scene + "/misalignment/" +
               std::string(pforge::to_string(mode)) + "/" +
               std::string(pforge::to_string(level));
        e.misalignment = MisalignRecipe{mode, level};
        add(std::move(e));
      }
    }
  }
  return plan;
}

namespace {

Json entry_to_json(const PlanEntry& entry) {
  Json j;
  j["id"] = entry.id;
  j["scene"] = entry.scene;
  j["category"] = std::string(to_string(entry.category));
  j["seed"] = entry.seed;
  switch (entry.category) {
    case Category::kClean:
      break;
    case Category::kImage:
    case Category::kDepth:
      j["kind"] = std::string(pforge::to_string(entry.spec->kind));
      j["severity"] = std::string(pforge::to_string(entry.spec->severity));
      j["mode"] = std::string(pforge::to_string(entry.spec->mode));
      break;
    case Category::kFasterMotion:
      j["severity"] = std::string(pforge::to_string(*entry.faster));
      break;
    case Category::kTrajectory:
      if (entry.trajectory->rotation.has_value()) {
        j["rotation_severity"] =
            std::string(pforge::to_string(*entry.trajectory->rotation));
      }
      if (entry.trajectory->translation.has_value()) {
        j["translation_severity"] =
            std::string(pforge::to_string(*entry.trajectory->translation));
      }
      break;
    case Category::kMisalignment:
      j["mode"] = std::string(pforge::to_string(entry.misalignment->mode));
      j["severity"] =
          std::string(pforge::to_string(entry.misalignment->severity));
      break;
  }
  return j;
}

[[noreturn]] void entry_error(std::size_t index, const std::string& what) {
  std::ostringstream msg;
  msg << "entries[" << index << "]: " << what;
  throw SchemaError(msg.str());
}

std::string require_string(const Json& j, std::size_t index,
                           const char* field) {
  if (!j.contains(field)) {
    entry_error(index, std::string("missing field '") + field + "'");
  }
  if (!j[field].is_string()) {
    entry_error(index, std::string("field '") + field + "' must be text");
  }
  return j[field].get<std::string>();
}

void check_fields(const Json& j, std::size_t index,
                  const std::set<std::string>& allowed) {
  for (const auto& [key, value] : j.items()) {
    if (allowed.find(key) == allowed.end()) {
      entry_error(index, "unexpected field '" + key + "'");
    }
  }
}

PlanEntry entry_from_json(const Json& j, std::size_t index) {
  if (!j.is_object()) {
    entry_error(index, "must be an object");
  }
  PlanEntry entry;
  entry.id = require_string(j, index, "id");
  entry.scene = require_string(j, index, "scene");
  entry.category = parse_category(require_string(j, index, "category"));
  if (!j.contains("seed") || !j["seed"].is_number_unsigned()) {
    entry_error(index, "missing or non-integer field 'seed'");
  }
  entry.seed = j["seed"].get<std::uint64_t>();

  const std::set<std::string> base = {"id", "scene", "category", "seed"};
  try {
    switch (entry.category) {
      case Category::kClean: {
        check_fields(j, index, base);
        break;
      }
      case Category::kImage:
      case Category::kDepth: {
        std::set<std::string> allowed = base;
        allowed.insert({"kind", "severity", "mode"});
        check_fields(j, index, allowed);
        PerturbationSpec spec;
        spec.kind = parse_kind(require_string(j, index, "kind"));
        spec.severity = parse_level(require_string(j, index, "severity"));
        spec.mode = parse_mode(require_string(j, index, "mode"));
        spec.seed = entry.seed;
        const bool want_rgb = entry.category == Category::kImage;
        if (want_rgb != kind_is_rgb(spec.kind) ||
            (!want_rgb && !kind_is_depth(spec.kind))) {
          entry_error(index, "kind '" +
                                 std::string(pforge::to_string(spec.kind)) +
                                 "' does not belong to this category");
        }
        spec.validate();
        entry.spec = spec;
        break;
      }
      case Category::kFasterMotion: {
        std::set<std::string> allowed = base;
        allowed.insert("severity");
        check_fields(j, index, allowed);
        entry.faster = parse_level(require_string(j, index, "severity"));
        break;
      }
      case Category::kTrajectory: {
        std::set<std::string> allowed = base;
        allowed.insert({"rotation_severity", "translation_severity"});
        check_fields(j, index, allowed);
        TrajectoryRecipe recipe;
        if (j.contains("rotation_severity")) {
          recipe.rotation =
              parse_level(require_string(j, index, "rotation_severity"));
        }
        if (j.contains("translation_severity")) {
          recipe.translation =
              parse_level(require_string(j, index, "translation_severity"));
        }
        if (!recipe.rotation.has_value() && !recipe.translation.has_value()) {
          entry_error(index,
                      "trajectory entry needs rotation_severity, "
                      "translation_severity, or both");
        }
        entry.trajectory = recipe;
        break;
      }
      case Category::kMisalignment: {
        std::set<std::string> allowed = base;
        allowed.insert({"mode", "severity"});
        check_fields(j, index, allowed);
        MisalignRecipe recipe;
        recipe.mode = parse_mode(require_string(j, index, "mode"));
        recipe.severity = parse_level(require_string(j, index, "severity"));
        entry.misalignment = recipe;
        break;
      }
    }
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    entry_error(index, e.what());
  }
  return entry;
}

}  // namespace

std::string plan_to_text(const BenchmarkPlan& plan) {
  Json j;
  j["schema"] = std::string(kPlanSchema);
  j["master_seed"] = plan.master_seed;
  Json entries = Json::array();
  for (const PlanEntry& entry : plan.entries) {
    entries.push_back(entry_to_json(entry));
  }
  j["entries"] = std::move(entries);
  return j.dump(2) + "\n";
}

BenchmarkPlan plan_from_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw SchemaError(std::string("plan document is not valid JSON: ") +
                      e.what());
  }
  if (!j.is_object()) {
    throw SchemaError("plan document must be a JSON object");
  }
  for (const auto& [key, value] : j.items()) {
    if (key != "schema" && key != "master_seed" && key != "entries") {
      throw SchemaError("unexpected top-level field '" + key + "'");
    }
  }
  if (!j.contains("schema") || !j["schema"].is_string() ||
      j["schema"].get<std::string>() != kPlanSchema) {
    throw SchemaError("missing or unsupported schema (want '" +
                      std::string(kPlanSchema) + "')");
  }
  if (!j.contains("master_seed") || !j["master_seed"].is_number_unsigned()) {
    throw SchemaError("missing or non-integer field 'master_seed'");
  }
  if (!j.contains("entries") || !j["entries"].is_array()) {
    throw SchemaError("missing field 'entries'");
  }

  BenchmarkPlan plan;
  plan.master_seed = j["master_seed"].get<std::uint64_t>();
  std::set<std::string> seen_ids;
  std::size_t index = 0;
  for (const Json& item : j["entries"]) {
    PlanEntry entry = entry_from_json(item, index);
    if (!seen_ids.insert(entry.id).second) {
      entry_error(index, "duplicate id '" + entry.id + "'");
    }
    plan.entries.push_back(std::move(entry));
    ++index;
  }
  return plan;
}

void write_plan_file(const std::filesystem::path& path,
                     const BenchmarkPlan& plan) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out << plan_to_text(plan);
  out.flush();
  if (!out) {
    throw IoError("write failure on " + path.string());
  }
}

BenchmarkPlan load_plan_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot read " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return plan_from_text(buffer.str());
}

}  // namespace pforge::plan
