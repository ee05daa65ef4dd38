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

#include "pforge/execute.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "pforge/depth_perturb.hpp"
#include "pforge/digest.hpp"
#include "pforge/errors.hpp"
#include "pforge/image_codec.hpp"
#include "pforge/rgb_perturb.hpp"
#include "pforge/rng.hpp"
#include "pforge/traj_perturb.hpp"

namespace pforge::run {

namespace {

using Json = nlohmann::ordered_json;

constexpr std::string_view kManifestSchema = "pforge-manifest/1";

void copy_bytes(const std::filesystem::path& src,
                const std::filesystem::path& dst) {
  std::filesystem::create_directories(dst.parent_path());
  io::write_file(dst, io::read_file(src));
}

/// Copies the whole source layout byte for byte: index files, ground truth,
/// and every listed image.
void copy_layout(const io::SequenceIndex& index,
                 const std::filesystem::path& src,
                 const std::filesystem::path& dst) {
  copy_bytes(src / "rgb.txt", dst / "rgb.txt");
  copy_bytes(src / "depth.txt", dst / "depth.txt");
  copy_bytes(src / "groundtruth.txt", dst / "groundtruth.txt");
  for (const io::IndexEntry& e : index.rgb) {
    copy_bytes(src / e.filename, dst / e.filename);
  }
  for (const io::IndexEntry& e : index.depth) {
    copy_bytes(src / e.filename, dst / e.filename);
  }
}

void run_image_entry(const plan::PlanEntry& entry,
                     const io::SequenceIndex& index,
                     const std::filesystem::path& src,
                     const std::filesystem::path& dst,
                     const SeverityTable& table) {
  copy_bytes(src / "rgb.txt", dst / "rgb.txt");
  copy_bytes(src / "depth.txt", dst / "depth.txt");
  copy_bytes(src / "groundtruth.txt", dst / "groundtruth.txt");
  for (const io::IndexEntry& e : index.depth) {
    copy_bytes(src / e.filename, dst / e.filename);
  }
  for (std::size_t i = 0; i < index.rgb.size(); ++i) {
    const io::IndexEntry& e = index.rgb[i];
    const RgbFrame frame = io::to_rgb_frame(
        io::decode_png_rgb8(io::read_file(src / e.filename)), e.timestamp);
    const RgbFrame perturbed = rgb::apply_rgb(frame, *entry.spec, i, table);
    const std::filesystem::path out_file = dst / e.filename;
    std::filesystem::create_directories(out_file.parent_path());
    io::write_file(out_file, io::encode_png(io::to_rgb8(perturbed)));
  }
}

void run_depth_entry(const plan::PlanEntry& entry,
                     const io::SequenceIndex& index,
                     const std::filesystem::path& src,
                     const std::filesystem::path& dst, double depth_scale,
                     const SeverityTable& table) {
  copy_bytes(src / "rgb.txt", dst / "rgb.txt");
  copy_bytes(src / "depth.txt", dst / "depth.txt");
  copy_bytes(src / "groundtruth.txt", dst / "groundtruth.txt");
  for (const io::IndexEntry& e : index.rgb) {
    copy_bytes(src / e.filename, dst / e.filename);
  }
  for (std::size_t i = 0; i < index.depth.size(); ++i) {
    const io::IndexEntry& e = index.depth[i];
    const DepthFrame frame = io::dequantize_depth(
        io::decode_png_gray16(io::read_file(src / e.filename)), depth_scale,
        e.timestamp);
    const DepthFrame perturbed =
        depth::apply_depth(frame, *entry.spec, i, table);
    const std::filesystem::path out_file = dst / e.filename;
    std::filesystem::create_directories(out_file.parent_path());
    io::write_file(out_file,
                   io::encode_png(io::quantize_depth(perturbed, depth_scale)));
  }
}

void run_trajectory_entry(const plan::PlanEntry& entry,
                          const io::SequenceIndex& index,
                          const std::filesystem::path& src,
                          const std::filesystem::path& dst,
                          const SeverityTable& table) {
  copy_bytes(src / "rgb.txt", dst / "rgb.txt");
  copy_bytes(src / "depth.txt", dst / "depth.txt");
  for (const io::IndexEntry& e : index.rgb) {
    copy_bytes(src / e.filename, dst / e.filename);
  }
  for (const io::IndexEntry& e : index.depth) {
    copy_bytes(src / e.filename, dst / e.filename);
  }

  const plan::TrajectoryRecipe& recipe = *entry.trajectory;
  Trajectory perturbed = index.ground_truth;
  if (recipe.rotation.has_value() && recipe.translation.has_value()) {
    perturbed = traj::perturb_se3(
        perturbed,
        table.params(PerturbationKind::kRotationDeviation, *recipe.rotation)
            .get("sigma_deg"),
        table
            .params(PerturbationKind::kTranslationDeviation,
                    *recipe.translation)
            .get("sigma_m"),
        entry.seed);
  } else if (recipe.rotation.has_value()) {
    perturbed = traj::perturb_rotation(
        perturbed,
        table.params(PerturbationKind::kRotationDeviation, *recipe.rotation)
            .get("sigma_deg"),
        entry.seed);
  } else {
    perturbed = traj::perturb_translation(
        perturbed,
        table
            .params(PerturbationKind::kTranslationDeviation,
                    *recipe.translation)
            .get("sigma_m"),
        entry.seed);
  }
  io::write_trajectory_file(dst / "groundtruth.txt", perturbed);
}

void run_faster_entry(const plan::PlanEntry& entry,
                      const io::SequenceIndex& index,
                      const std::filesystem::path& src,
                      const std::filesystem::path& dst, double depth_scale,
                      const SeverityTable& table) {
  const io::AssociatedIndex assoc = io::associate_sequence_index(index);
  const long k =
      table.params(PerturbationKind::kFasterMotion, *entry.faster)
          .get_int("k");
  const std::size_t n = assoc.frames.size();
  if (n == 0 || static_cast<std::size_t>(k) > n) {
    throw TooShort("sequence has fewer frames than the speed-up factor");
  }
  io::SequenceWriter writer(dst, depth_scale);
  for (std::size_t i = 0; i < n; i += static_cast<std::size_t>(k)) {
    const io::AssociatedFrame& f = assoc.frames[i];
    writer.add_frame_bytes(
        f.timestamp, io::read_file(src / f.rgb_file),
        io::read_file(src / f.depth_file),
        Pose(f.timestamp, f.pose.position, f.pose.orientation));
  }
  writer.finalize();
}

void run_misalign_entry(const plan::PlanEntry& entry,
                        const io::SequenceIndex& index,
                        const std::filesystem::path& src,
                        const std::filesystem::path& dst, double depth_scale,
                        const SeverityTable& table) {
  const io::AssociatedIndex assoc = io::associate_sequence_index(index);
  const plan::MisalignRecipe& recipe = *entry.misalignment;
  const long delay =
      table.params(PerturbationKind::kSensorMisalignment, recipe.severity)
          .get_int("k");
  const long jitter = recipe.mode == PerturbationMode::kDynamic ? 1 : 0;

  const std::size_t n = assoc.frames.size();
  const std::size_t reach =
      static_cast<std::size_t>(delay) + static_cast<std::size_t>(jitter);
  if (reach >= n) {
    throw DelayExceedsSequence(
        "misalignment delay leaves no frames in the sequence");
  }
  const std::size_t out_n = n - reach;

  io::SequenceWriter writer(dst, depth_scale);
  for (std::size_t i = 0; i < out_n; ++i) {
    std::size_t offset = static_cast<std::size_t>(delay);
    if (jitter > 0) {
      RngStream rng(entry.seed, static_cast<std::uint64_t>(i),
                    kind_id(PerturbationKind::kSensorMisalignment),
                    RngLane::kOffset);
      offset += rng.uniform_below(2ull * jitter + 1ull);
      offset -= static_cast<std::size_t>(jitter);
    }
    // The depth stream lags: frame i pairs the color image at i with depth
    // content captured offset frames later, restamped to the reference
    // timeline.
    const io::AssociatedFrame& ref = assoc.frames[i];
    const io::AssociatedFrame& stale = assoc.frames[i + offset];
    writer.add_frame_bytes(
        ref.timestamp, io::read_file(src / ref.rgb_file),
        io::read_file(src / stale.depth_file),
        Pose(ref.timestamp, ref.pose.position, ref.pose.orientation));
  }
  writer.finalize();
}

std::map<std::string, std::string> digest_tree(
    const std::filesystem::path& root) {
  std::vector<std::filesystem::path> files;
  for (const auto& item :
       std::filesystem::recursive_directory_iterator(root)) {
    if (item.is_regular_file()) {
      files.push_back(item.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::map<std::string, std::string> digests;
  for (const auto& file : files) {
    digests.emplace(file.lexically_relative(root).generic_string(),
                    sha256_file(file));
  }
  return digests;
}

EntryResult run_entry(const plan::PlanEntry& entry,
                      const ExecuteOptions& options,
                      const SeverityTable& table) {
  EntryResult result;
  result.id = entry.id;
  result.category = std::string(plan::to_string(entry.category));
  result.seed = entry.seed;
  result.output = entry.id;

  const std::filesystem::path src = options.source_root / entry.scene;
  const std::filesystem::path dst = options.output_root / entry.id;
  try {
    std::filesystem::remove_all(dst);
    std::filesystem::create_directories(dst);

    const io::SequenceIndex index = io::read_sequence_index(src);
    switch (entry.category) {
      case plan::Category::kClean:
        copy_layout(index, src, dst);
        break;
      case plan::Category::kImage:
        run_image_entry(entry, index, src, dst, table);
        break;
      case plan::Category::kDepth:
        run_depth_entry(entry, index, src, dst, options.depth_scale, table);
        break;
      case plan::Category::kTrajectory:
        run_trajectory_entry(entry, index, src, dst, table);
        break;
      case plan::Category::kFasterMotion:
        run_faster_entry(entry, index, src, dst, options.depth_scale, table);
        break;
      case plan::Category::kMisalignment:
        run_misalign_entry(entry, index, src, dst, options.depth_scale,
                           table);
        break;
    }
    result.files = digest_tree(dst);
    result.ok = true;
  } catch (const std::exception& e) {
    result.ok = false;
    result.error = e.what();
    result.files.clear();
  }
  return result;
}

}  // namespace

std::size_t Manifest::failures() const {
  std::size_t n = 0;
  for (const EntryResult& e : entries) {
    if (!e.ok) {
      ++n;
    }
  }
  return n;
}

Manifest execute_plan(const plan::BenchmarkPlan& plan,
                      const ExecuteOptions& options,
                      const SeverityTable& table) {
  if (options.jobs < 1) {
    throw InvalidParameter("worker count must be at least 1");
  }

  // Entry outputs must be disjoint directories: a nested id would let one
  // entry delete or hash another's files.
  std::set<std::string> ids;
  for (const plan::PlanEntry& entry : plan.entries) {
    ids.insert(entry.id);
  }
  for (auto it = ids.begin(); it != ids.end(); ++it) {
    auto next = std::next(it);
    if (next != ids.end() && next->size() > it->size() &&
        next->compare(0, it->size(), *it) == 0 &&
        (*next)[it->size()] == '/') {
      throw PlanShapeError("entry id '" + *next + "' nests inside '" + *it +
                           "'");
    }
  }

  // Fail fast when a source sequence is absent entirely.
  std::set<std::string> scenes;
  for (const plan::PlanEntry& entry : plan.entries) {
    scenes.insert(entry.scene);
  }
  for (const std::string& scene : scenes) {
    const std::filesystem::path src = options.source_root / scene;
    if (!std::filesystem::is_directory(src) ||
        !std::filesystem::exists(src / "rgb.txt") ||
        !std::filesystem::exists(src / "depth.txt") ||
        !std::filesystem::exists(src / "groundtruth.txt")) {
      throw MissingSource("no source sequence for scene '" + scene +
                          "' under " + options.source_root.string());
    }
  }

  Manifest manifest;
  manifest.master_seed = plan.master_seed;
  manifest.entries.resize(plan.entries.size());

  std::atomic<std::size_t> cursor{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= plan.entries.size()) {
        return;
      }
      manifest.entries[i] = run_entry(plan.entries[i], options, table);
    }
  };

  const int jobs = std::min<int>(
      options.jobs, static_cast<int>(std::max<std::size_t>(
                        1, plan.entries.size())));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(jobs));
    for (int t = 0; t < jobs; ++t) {
      threads.emplace_back(worker);
    }
    for (std::thread& t : threads) {
      t.join();
    }
  }
  return manifest;
}

namespace {

[[noreturn]] void manifest_error(std::size_t index, const std::string& what) {
  std::ostringstream msg;
  msg << "entries[" << index << "]: " << what;
  throw SchemaError(msg.str());
}

}  // namespace

std::string manifest_to_text(const Manifest& manifest) {
  Json j;
  j["schema"] = std::string(kManifestSchema);
  j["master_seed"] = manifest.master_seed;
  Json entries = Json::array();
  for (const EntryResult& e : manifest.entries) {
    Json item;
    item["id"] = e.id;
    item["category"] = e.category;
    item["seed"] = e.seed;
    item["output"] = e.output;
    item["status"] = e.ok ? "ok" : "failed";
    if (!e.ok) {
      item["error"] = e.error;
    }
    Json files = Json::object();
    for (const auto& [path, digest] : e.files) {
      files[path] = digest;
    }
    item["files"] = std::move(files);
    entries.push_back(std::move(item));
  }
  j["entries"] = std::move(entries);
  return j.dump(2) + "\n";
}

Manifest manifest_from_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw SchemaError(std::string("manifest document is not valid JSON: ") +
                      e.what());
  }
  if (!j.is_object()) {
    throw SchemaError("manifest document must be a JSON object");
  }
  for (const auto& [key, value] : j.items()) {
    if (key != "schema" && key != "master_seed" && key != "entries") {
      throw SchemaError("unexpected top-level field '" + key + "'");
    }
  }
  if (!j.contains("schema") || !j["schema"].is_string() ||
      j["schema"].get<std::string>() != kManifestSchema) {
    throw SchemaError("missing or unsupported schema (want '" +
                      std::string(kManifestSchema) + "')");
  }
  if (!j.contains("master_seed") || !j["master_seed"].is_number_unsigned()) {
    throw SchemaError("missing or non-integer field 'master_seed'");
  }
  if (!j.contains("entries") || !j["entries"].is_array()) {
    throw SchemaError("missing field 'entries'");
  }

  Manifest manifest;
  manifest.master_seed = j["master_seed"].get<std::uint64_t>();
  std::size_t index = 0;
  for (const Json& item : j["entries"]) {
    if (!item.is_object()) {
      manifest_error(index, "must be an object");
    }
    EntryResult e;
    for (const auto& [key, value] : item.items()) {
      if (key != "id" && key != "category" && key != "seed" &&
          key != "output" && key != "status" && key != "error" &&
          key != "files") {
        manifest_error(index, "unexpected field '" + key + "'");
      }
    }
    auto need_string = [&](const char* field) {
      if (!item.contains(field) || !item[field].is_string()) {
        manifest_error(index,
                       std::string("missing or non-text field '") + field +
                           "'");
      }
      return item[field].get<std::string>();
    };
    e.id = need_string("id");
    e.category = need_string("category");
    if (!item.contains("seed") || !item["seed"].is_number_unsigned()) {
      manifest_error(index, "missing or non-integer field 'seed'");
    }
    e.seed = item["seed"].get<std::uint64_t>();
    e.output = need_string("output");
    const std::string status = need_string("status");
    if (status != "ok" && status != "failed") {
      manifest_error(index, "status must be 'ok' or 'failed'");
    }
    e.ok = status == "ok";
    if (item.contains("error")) {
      if (e.ok) {
        manifest_error(index, "unexpected field 'error' on an ok entry");
      }
      e.error = item["error"].get<std::string>();
    }
    if (!item.contains("files") || !item["files"].is_object()) {
      manifest_error(index, "missing field 'files'");
    }
    for (const auto& [path, digest] : item["files"].items()) {
      if (!digest.is_string()) {
        manifest_error(index, "file digest for '" + path + "' must be text");
      }
      e.files.emplace(path, digest.get<std::string>());
    }
    manifest.entries.push_back(std::move(e));
    ++index;
  }
  return manifest;
}

void write_manifest_file(const std::filesystem::path& path,
                         const Manifest& manifest) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out << manifest_to_text(manifest);
  out.flush();
  if (!out) {
    throw IoError("write failure on " + path.string());
  }
}

Manifest load_manifest_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot read " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return manifest_from_text(buffer.str());
}

}  // namespace pforge::run
