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

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <doctest.h>

#include "pforge/dataset_io.hpp"
#include "pforge/depth_perturb.hpp"
#include "pforge/digest.hpp"
#include "pforge/errors.hpp"
#include "pforge/execute.hpp"
#include "pforge/image_codec.hpp"
#include "pforge/misalign.hpp"
#include "pforge/plan.hpp"
#include "pforge/rgb_perturb.hpp"
#include "pforge/rng.hpp"
#include "pforge/traj_perturb.hpp"
#include "test_support.hpp"

using pforge::PerturbationKind;
using pforge::PerturbationMode;
using pforge::PerturbationSpec;
using pforge::SeverityLevel;
using pforge::plan::BenchmarkPlan;
using pforge::plan::Category;
using pforge::plan::PlanEntry;
using pforge::run::ExecuteOptions;
using pforge::run::Manifest;
using test_support::TempDir;

namespace {

PlanEntry clean_entry(const std::string& scene, std::uint64_t seed) {
  PlanEntry e;
  e.id = scene + "/clean";
  e.scene = scene;
  e.category = Category::kClean;
  e.seed = seed;
  return e;
}

PlanEntry spec_entry(const std::string& scene, PerturbationKind kind,
                     SeverityLevel level, PerturbationMode mode,
                     std::uint64_t seed) {
  PlanEntry e;
  e.scene = scene;
  e.category = pforge::kind_is_rgb(kind) ? Category::kImage : Category::kDepth;
  e.seed = seed;
  e.id = scene + "/" + std::string(pforge::to_string(kind)) + "/" +
         std::string(pforge::to_string(level));
  PerturbationSpec spec;
  spec.kind = kind;
  spec.severity = level;
  spec.mode = mode;
  spec.seed = seed;
  e.spec = spec;
  return e;
}

std::map<std::string, std::string> digest_dir(
    const std::filesystem::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& item : std::filesystem::recursive_directory_iterator(root)) {
    if (!item.is_regular_file()) continue;
    files[item.path().lexically_relative(root).generic_string()] =
        pforge::sha256_file(item.path());
  }
  return files;
}

ExecuteOptions options_for(const TempDir& src, const TempDir& out) {
  ExecuteOptions options;
  options.source_root = src.path();
  options.output_root = out.path();
  return options;
}

}  // namespace

TEST_CASE("sha256 helpers match the published test vectors") {
  CHECK(pforge::sha256_hex(std::string("abc")) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(pforge::sha256_hex(std::string()) ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(pforge::seed_from_text("") == 0xe3b0c44298fc1c14ULL);
  CHECK(pforge::seed_from_text("abc") == 0xba7816bf8f01cfeaULL);

  TempDir dir;
  pforge::io::write_file(dir / "f.bin", {'a', 'b', 'c'});
  CHECK(pforge::sha256_file(dir / "f.bin") ==
        pforge::sha256_hex(std::string("abc")));
}

TEST_CASE("clean entries copy the source byte for byte") {
  TempDir src;
  TempDir out;
  test_support::write_scene(src / "sceneA", 5);

  BenchmarkPlan plan;
  plan.master_seed = 1;
  plan.entries.push_back(clean_entry("sceneA", 77));

  const Manifest manifest = pforge::run::execute_plan(
      plan, options_for(src, out), pforge::SeverityTable::builtin());
  REQUIRE(manifest.entries.size() == 1);
  const pforge::run::EntryResult& result = manifest.entries[0];
  CHECK(result.ok);
  CHECK(result.error.empty());
  CHECK(result.output == "sceneA/clean");

  const auto source_digests = digest_dir(src / "sceneA");
  CHECK(result.files == source_digests);
  CHECK(result.files == digest_dir(out.path() / "sceneA" / "clean"));
  CHECK(result.files.count("rgb.txt") == 1);
  CHECK(result.files.count("rgb/000000_0.000000.png") == 1);
  for (const auto& [path, digest] : result.files) {
    CHECK(digest.size() == 64);
    CHECK(digest.find_first_not_of("0123456789abcdef") == std::string::npos);
  }
}

TEST_CASE("execution is reproducible and independent of the worker count") {
  TempDir src;
  test_support::write_scene(src / "sceneA", 6);

  BenchmarkPlan plan;
  plan.master_seed = 9;
  plan.entries.push_back(clean_entry("sceneA", 1));
  plan.entries.push_back(spec_entry("sceneA", PerturbationKind::kGaussianNoise,
                                    SeverityLevel::kLow,
                                    PerturbationMode::kStatic, 101));
  plan.entries.push_back(spec_entry("sceneA", PerturbationKind::kImpulseNoise,
                                    SeverityLevel::kMedium,
                                    PerturbationMode::kDynamic, 102));
  plan.entries.push_back(
      spec_entry("sceneA", PerturbationKind::kDepthGaussianNoise,
                 SeverityLevel::kMedium, PerturbationMode::kStatic, 103));

  TempDir out1;
  TempDir out2;
  TempDir out3;
  const pforge::SeverityTable table = pforge::SeverityTable::builtin();
  ExecuteOptions serial = options_for(src, out1);
  const Manifest first = pforge::run::execute_plan(plan, serial, table);

  ExecuteOptions again = options_for(src, out2);
  const Manifest second = pforge::run::execute_plan(plan, again, table);
  CHECK(first == second);

  ExecuteOptions parallel = options_for(src, out3);
  parallel.jobs = 4;
  const Manifest third = pforge::run::execute_plan(plan, parallel, table);
  CHECK(first == third);

  CHECK(first.failures() == 0);
  for (const auto& entry : first.entries) {
    CHECK(entry.files == digest_dir(out3.path() / entry.output));
  }

  ExecuteOptions bad = options_for(src, out1);
  bad.jobs = 0;
  CHECK_THROWS_AS(pforge::run::execute_plan(plan, bad, table),
                  pforge::InvalidParameter);
}

TEST_CASE("image entries rewrite exactly the color stream") {
  TempDir src;
  TempDir out;
  const auto scene_dir = src / "sceneA";
  test_support::write_scene(scene_dir, 4);

  BenchmarkPlan plan;
  plan.master_seed = 3;
  plan.entries.push_back(spec_entry("sceneA", PerturbationKind::kGaussianNoise,
                                    SeverityLevel::kLow,
                                    PerturbationMode::kStatic, 424242));

  const pforge::SeverityTable table = pforge::SeverityTable::builtin();
  const Manifest manifest =
      pforge::run::execute_plan(plan, options_for(src, out), table);
  REQUIRE(manifest.entries.size() == 1);
  REQUIRE(manifest.entries[0].ok);
  const auto dst = out.path() / manifest.entries[0].output;

  // Everything except the color images is byte-identical to the source.
  const auto src_files = digest_dir(scene_dir);
  const auto dst_files = manifest.entries[0].files;
  REQUIRE(src_files.size() == dst_files.size());
  for (const auto& [path, digest] : src_files) {
    REQUIRE(dst_files.count(path) == 1);
    if (path.rfind("rgb/", 0) == 0) {
      CHECK(dst_files.at(path) != digest);
    } else {
      CHECK(dst_files.at(path) == digest);
    }
  }

  // Each written frame equals the perturbation primitive applied to the
  // decoded source frame, keyed by its row in the color index.
  const pforge::io::SequenceIndex index =
      pforge::io::read_sequence_index(scene_dir);
  for (std::size_t i = 0; i < index.rgb.size(); ++i) {
    const pforge::io::Rgb8Image source = pforge::io::decode_png_rgb8(
        pforge::io::read_file(scene_dir / index.rgb[i].filename));
    const pforge::RgbFrame frame =
        pforge::io::to_rgb_frame(source, index.rgb[i].timestamp);
    const pforge::RgbFrame expected =
        pforge::rgb::apply_rgb(frame, *plan.entries[0].spec, i, table);
    const pforge::io::Rgb8Image actual = pforge::io::decode_png_rgb8(
        pforge::io::read_file(dst / index.rgb[i].filename));
    CHECK(actual.pixels == pforge::io::to_rgb8(expected).pixels);
  }
}

TEST_CASE("depth entries rewrite exactly the depth stream") {
  TempDir src;
  TempDir out;
  const auto scene_dir = src / "sceneA";
  test_support::write_scene(scene_dir, 4);

  BenchmarkPlan plan;
  plan.master_seed = 3;
  plan.entries.push_back(
      spec_entry("sceneA", PerturbationKind::kDepthRandomMissing,
                 SeverityLevel::kHigh, PerturbationMode::kStatic, 5150));

  const pforge::SeverityTable table = pforge::SeverityTable::builtin();
  const Manifest manifest =
      pforge::run::execute_plan(plan, options_for(src, out), table);
  REQUIRE(manifest.entries.size() == 1);
  REQUIRE(manifest.entries[0].ok);
  const auto dst = out.path() / manifest.entries[0].output;

  const auto src_files = digest_dir(scene_dir);
  const auto dst_files = manifest.entries[0].files;
  REQUIRE(src_files.size() == dst_files.size());
  bool any_changed = false;
  for (const auto& [path, digest] : src_files) {
    REQUIRE(dst_files.count(path) == 1);
    if (path.rfind("depth/", 0) == 0) {
      any_changed = any_changed || dst_files.at(path) != digest;
    } else {
      CHECK(dst_files.at(path) == digest);
    }
  }
  CHECK(any_changed);

  const pforge::io::SequenceIndex index =
      pforge::io::read_sequence_index(scene_dir);
  for (std::size_t i = 0; i < index.depth.size(); ++i) {
    const pforge::io::Gray16Image source = pforge::io::decode_png_gray16(
        pforge::io::read_file(scene_dir / index.depth[i].filename));
    const pforge::DepthFrame frame = pforge::io::dequantize_depth(
        source, pforge::io::kDefaultDepthScale, index.depth[i].timestamp);
    const pforge::DepthFrame expected =
        pforge::depth::apply_depth(frame, *plan.entries[0].spec, i, table);
    const pforge::io::Gray16Image actual = pforge::io::decode_png_gray16(
        pforge::io::read_file(dst / index.depth[i].filename));
    CHECK(actual.pixels ==
          pforge::io::quantize_depth(expected, pforge::io::kDefaultDepthScale)
              .pixels);
  }
}

TEST_CASE("trajectory entries rewrite only the ground truth") {
  TempDir src;
  TempDir out;
  const auto scene_dir = src / "sceneA";
  test_support::write_scene(scene_dir, 8);
  const pforge::SeverityTable table = pforge::SeverityTable::builtin();

  BenchmarkPlan plan;
  plan.master_seed = 6;

  PlanEntry rot;
  rot.id = "sceneA/trajectory/rotation/medium";
  rot.scene = "sceneA";
  rot.category = Category::kTrajectory;
  rot.seed = 21;
  rot.trajectory = pforge::plan::TrajectoryRecipe{SeverityLevel::kMedium, {}};
  plan.entries.push_back(rot);

  PlanEntry combined;
  combined.id = "sceneA/trajectory/combined/high-low";
  combined.scene = "sceneA";
  combined.category = Category::kTrajectory;
  combined.seed = 22;
  combined.trajectory = pforge::plan::TrajectoryRecipe{SeverityLevel::kHigh,
                                                       SeverityLevel::kLow};
  plan.entries.push_back(combined);

  const Manifest manifest =
      pforge::run::execute_plan(plan, options_for(src, out), table);
  REQUIRE(manifest.entries.size() == 2);

  const pforge::Trajectory gt =
      pforge::io::load_trajectory_file(scene_dir / "groundtruth.txt");
  const auto src_files = digest_dir(scene_dir);

  {
    REQUIRE(manifest.entries[0].ok);
    const auto& files = manifest.entries[0].files;
    for (const auto& [path, digest] : src_files) {
      if (path != "groundtruth.txt") {
        CHECK(files.at(path) == digest);
      }
    }
    const double sigma_deg =
        table.params(PerturbationKind::kRotationDeviation,
                     SeverityLevel::kMedium)
            .get("sigma_deg");
    const pforge::Trajectory expected =
        pforge::traj::perturb_rotation(gt, sigma_deg, 21);
    TempDir oracle;
    pforge::io::write_trajectory_file(oracle / "gt.txt", expected);
    CHECK(files.at("groundtruth.txt") ==
          pforge::sha256_file(oracle / "gt.txt"));
  }
  {
    REQUIRE(manifest.entries[1].ok);
    const double sigma_deg =
        table.params(PerturbationKind::kRotationDeviation, SeverityLevel::kHigh)
            .get("sigma_deg");
    const double sigma_m =
        table.params(PerturbationKind::kTranslationDeviation,
                     SeverityLevel::kLow)
            .get("sigma_m");
    const pforge::Trajectory expected =
        pforge::traj::perturb_se3(gt, sigma_deg, sigma_m, 22);
    TempDir oracle;
    pforge::io::write_trajectory_file(oracle / "gt.txt", expected);
    CHECK(manifest.entries[1].files.at("groundtruth.txt") ==
          pforge::sha256_file(oracle / "gt.txt"));
  }
}

TEST_CASE("faster-motion entries keep every k-th frame") {
  TempDir src;
  TempDir out;
  test_support::write_scene(src / "sceneA", 10);

  BenchmarkPlan plan;
  plan.master_seed = 2;
  PlanEntry entry;
  entry.id = "sceneA/faster_motion/high";  // k = 8
  entry.scene = "sceneA";
  entry.category = Category::kFasterMotion;
  entry.seed = 31;
  entry.faster = SeverityLevel::kHigh;
  plan.entries.push_back(entry);
  entry.id = "sceneA/faster_motion/low";  // k = 2
  entry.faster = SeverityLevel::kLow;
  plan.entries.push_back(entry);

  const Manifest manifest = pforge::run::execute_plan(
      plan, options_for(src, out), pforge::SeverityTable::builtin());
  REQUIRE(manifest.entries.size() == 2);
  REQUIRE(manifest.entries[0].ok);
  REQUIRE(manifest.entries[1].ok);

  {
    // k=8 over 10 frames keeps source frames 0 and 8.
    const pforge::io::LoadedSequence loaded =
        pforge::io::load_sequence(out.path() / "sceneA/faster_motion/high");
    REQUIRE(loaded.sequence.rgb.size() == 2);
    const pforge::io::SequenceIndex index = pforge::io::read_sequence_index(
        out.path() / "sceneA/faster_motion/high");
    CHECK(index.rgb[0].filename == "rgb/000000_0.000000.png");
    CHECK(index.rgb[1].filename == "rgb/000001_0.800000.png");
    CHECK(loaded.sequence.rgb[0].pixels[0] == doctest::Approx(0.0f));
    CHECK(loaded.sequence.rgb[1].pixels[0] ==
          doctest::Approx(8.0f / 255.0f));
    CHECK(loaded.sequence.trajectory.at(1).position.x() ==
          doctest::Approx(0.4));
    CHECK(loaded.sequence.trajectory.at(1).timestamp ==
          doctest::Approx(0.8));
  }
  {
    const pforge::io::LoadedSequence loaded =
        pforge::io::load_sequence(out.path() / "sceneA/faster_motion/low");
    REQUIRE(loaded.sequence.rgb.size() == 5);
    for (int i = 0; i < 5; ++i) {
      CHECK(loaded.sequence.rgb[i].pixels[0] ==
            doctest::Approx(2.0f * i / 255.0f));
    }
  }
}

TEST_CASE("misalignment entries shift the depth stream") {
  TempDir src;
  TempDir out;
  test_support::write_scene(src / "sceneA", 12);
  const pforge::SeverityTable table = pforge::SeverityTable::builtin();

  BenchmarkPlan plan;
  plan.master_seed = 4;
  PlanEntry entry;
  entry.id = "sceneA/misalignment/static/low";  // delay 5
  entry.scene = "sceneA";
  entry.category = Category::kMisalignment;
  entry.seed = 41;
  entry.misalignment = pforge::plan::MisalignRecipe{PerturbationMode::kStatic,
                                                    SeverityLevel::kLow};
  plan.entries.push_back(entry);
  entry.id = "sceneA/misalignment/dynamic/low";  // delay 5 +- 1
  entry.seed = 43;
  entry.misalignment = pforge::plan::MisalignRecipe{PerturbationMode::kDynamic,
                                                    SeverityLevel::kLow};
  plan.entries.push_back(entry);

  const Manifest manifest =
      pforge::run::execute_plan(plan, options_for(src, out), table);
  REQUIRE(manifest.entries.size() == 2);
  REQUIRE(manifest.entries[0].ok);
  REQUIRE(manifest.entries[1].ok);

  {
    const auto root = out.path() / "sceneA/misalignment/static/low";
    const pforge::io::SequenceIndex index =
        pforge::io::read_sequence_index(root);
    REQUIRE(index.rgb.size() == 7);  // 12 - 5
    for (std::size_t i = 0; i < index.rgb.size(); ++i) {
      const auto rgb = pforge::io::decode_png_rgb8(
          pforge::io::read_file(root / index.rgb[i].filename));
      const auto depth = pforge::io::decode_png_gray16(
          pforge::io::read_file(root / index.depth[i].filename));
      CHECK(test_support::rgb_tag(rgb) == static_cast<int>(i));
      CHECK(test_support::depth_tag(depth) == static_cast<int>(i) + 5);
      // Both streams are restamped to the color timeline.
      CHECK(index.depth[i].timestamp == doctest::Approx(0.1 * i));
    }
    const pforge::Trajectory gt =
        pforge::io::load_trajectory_file(root / "groundtruth.txt");
    REQUIRE(gt.size() == 7);
    CHECK(gt.at(3).position.x() == doctest::Approx(0.15));  // pose 3, not 8
  }
  {
    const auto root = out.path() / "sceneA/misalignment/dynamic/low";
    const pforge::io::SequenceIndex index =
        pforge::io::read_sequence_index(root);
    REQUIRE(index.rgb.size() == 6);  // 12 - 5 - 1
    for (std::size_t i = 0; i < index.rgb.size(); ++i) {
      const auto depth = pforge::io::decode_png_gray16(
          pforge::io::read_file(root / index.depth[i].filename));
      pforge::RngStream stream(
          43, static_cast<std::uint64_t>(i),
          pforge::kind_id(PerturbationKind::kSensorMisalignment),
          pforge::RngLane::kOffset);
      const int offset = 4 + static_cast<int>(stream.uniform_below(3));
      CHECK(test_support::depth_tag(depth) == static_cast<int>(i) + offset);
    }
  }
}

TEST_CASE("a plan naming an absent scene fails before any work") {
  TempDir src;
  TempDir out;
  test_support::write_scene(src / "sceneA", 3);

  BenchmarkPlan plan;
  plan.entries.push_back(clean_entry("sceneA", 1));
  plan.entries.push_back(clean_entry("ghost", 2));

  CHECK_THROWS_WITH_AS(
      pforge::run::execute_plan(plan, options_for(src, out),
                                pforge::SeverityTable::builtin()),
      doctest::Contains("ghost"), pforge::MissingSource);
  CHECK_FALSE(std::filesystem::exists(out.path() / "sceneA" / "clean"));
}

TEST_CASE("a failing entry is recorded and the run continues") {
  TempDir src;
  TempDir out;
  test_support::write_scene(src / "sceneA", 12);

  BenchmarkPlan plan;
  PlanEntry bad;
  bad.id = "sceneA/misalignment/static/high";  // delay 20 >= 12 frames
  bad.scene = "sceneA";
  bad.category = Category::kMisalignment;
  bad.seed = 50;
  bad.misalignment = pforge::plan::MisalignRecipe{PerturbationMode::kStatic,
                                                  SeverityLevel::kHigh};
  plan.entries.push_back(bad);
  plan.entries.push_back(clean_entry("sceneA", 51));

  const Manifest manifest = pforge::run::execute_plan(
      plan, options_for(src, out), pforge::SeverityTable::builtin());
  REQUIRE(manifest.entries.size() == 2);
  CHECK(manifest.failures() == 1);
  CHECK_FALSE(manifest.entries[0].ok);
  CHECK_FALSE(manifest.entries[0].error.empty());
  CHECK(manifest.entries[0].files.empty());
  CHECK(manifest.entries[1].ok);
}

TEST_CASE("entry ids must not nest") {
  TempDir src;
  TempDir out;
  test_support::write_scene(src / "sceneA", 3);

  BenchmarkPlan plan;
  plan.entries.push_back(clean_entry("sceneA", 1));
  PlanEntry nested = clean_entry("sceneA", 2);
  nested.id = "sceneA/clean/extra";
  plan.entries.push_back(nested);

  CHECK_THROWS_AS(
      pforge::run::execute_plan(plan, options_for(src, out),
                                pforge::SeverityTable::builtin()),
      pforge::PlanShapeError);
}

TEST_CASE("changing the seed changes stochastic outputs but not clean ones") {
  TempDir src;
  test_support::write_scene(src / "sceneA", 3);
  const pforge::SeverityTable table = pforge::SeverityTable::builtin();

  auto run_with_seed = [&](std::uint64_t seed) {
    TempDir out;
    BenchmarkPlan plan;
    plan.master_seed = seed;
    plan.entries.push_back(clean_entry("sceneA", seed * 1000));
    plan.entries.push_back(
        spec_entry("sceneA", PerturbationKind::kGaussianNoise,
                   SeverityLevel::kMedium, PerturbationMode::kStatic, seed));
    return pforge::run::execute_plan(plan, options_for(src, out), table);
  };

  const Manifest a = run_with_seed(1);
  const Manifest b = run_with_seed(2);
  CHECK(a.entries[0].files == b.entries[0].files);
  CHECK(a.entries[1].files != b.entries[1].files);
}

TEST_CASE("manifest documents round trip and reject malformed input") {
  Manifest manifest;
  manifest.master_seed = 12;
  pforge::run::EntryResult ok;
  ok.id = "s/clean";
  ok.category = "clean";
  ok.seed = 1;
  ok.output = "s/clean";
  ok.ok = true;
  ok.files = {{"rgb.txt", std::string(64, 'a')},
              {"rgb/000000_0.000000.png", std::string(64, 'b')}};
  manifest.entries.push_back(ok);
  pforge::run::EntryResult failed;
  failed.id = "s/bad";
  failed.category = "misalignment";
  failed.seed = 2;
  failed.output = "s/bad";
  failed.ok = false;
  failed.error = "delay exceeds sequence";
  manifest.entries.push_back(failed);

  const std::string text = pforge::run::manifest_to_text(manifest);
  const Manifest reloaded = pforge::run::manifest_from_text(text);
  CHECK(reloaded == manifest);
  CHECK(pforge::run::manifest_to_text(reloaded) == text);

  CHECK_THROWS_AS(pforge::run::manifest_from_text("{"), pforge::SchemaError);
  CHECK_THROWS_AS(pforge::run::manifest_from_text(
                      R"({"schema":"pforge-manifest/1","master_seed":0,)"
                      R"("entries":[],"extra":1})"),
                  pforge::SchemaError);
  CHECK_THROWS_AS(pforge::run::manifest_from_text(
                      R"({"schema":"other","master_seed":0,"entries":[]})"),
                  pforge::SchemaError);
  // A failed entry cannot claim files; an ok entry cannot carry an error.
  CHECK_THROWS_AS(
      pforge::run::manifest_from_text(
          R"({"schema":"pforge-manifest/1","master_seed":0,"entries":[)"
          R"({"id":"a/b","category":"clean","seed":1,"output":"a/b",)"
          R"("status":"ok","error":"boom","files":{}}]})"),
      pforge::SchemaError);
  CHECK_THROWS_AS(
      pforge::run::manifest_from_text(
          R"({"schema":"pforge-manifest/1","master_seed":0,"entries":[)"
          R"({"id":"a/b","category":"clean","seed":1,"output":"a/b",)"
          R"("status":"weird","files":{}}]})"),
      pforge::SchemaError);
}
