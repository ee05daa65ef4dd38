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

#ifndef PFORGE_EXECUTE_HPP
#define PFORGE_EXECUTE_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "pforge/dataset_io.hpp"
#include "pforge/plan.hpp"
#include "pforge/severity.hpp"

namespace pforge::run {

/// Outcome of materializing one plan entry.
struct EntryResult {
  std::string id;
  std::string category;
  std::uint64_t seed = 0;
  std::string output;  // directory relative to the output root (equals id)
  bool ok = false;
  std::string error;  // set when the entry failed
  // Relative path -> SHA-256 hex of every file produced for this entry,
  // sorted by path.
  std::map<std::string, std::string> files;

  bool operator==(const EntryResult&) const = default;
};

struct Manifest {
  std::uint64_t master_seed = 0;
  std::vector<EntryResult> entries;  // in plan order

  std::size_t failures() const;
  bool operator==(const Manifest&) const = default;
};

struct ExecuteOptions {
  std::filesystem::path source_root;  // source_root/<scene> per scene
  std::filesystem::path output_root;
  int jobs = 1;
  double depth_scale = io::kDefaultDepthScale;
};

/// Materializes every plan entry under output_root/<entry id>.
///
/// Per category: clean copies the source byte for byte; image and depth
/// entries re-encode the perturbed stream and copy everything else;
/// trajectory entries rewrite only the ground-truth file; faster-motion and
/// misalignment entries rebuild the sequence with canonical frame names.
/// The color timeline is the reference for structural entries.
///
/// Entries run in parallel (`jobs` workers); results are ordered by plan
/// position regardless of scheduling, and outputs do not depend on the
/// worker count.  A failing entry is recorded with its error and execution
/// continues.  Throws MissingSource before any work if a scene has no
/// source layout, and PlanShapeError if one entry id nests inside another.
Manifest execute_plan(const plan::BenchmarkPlan& plan,
                      const ExecuteOptions& options,
                      const SeverityTable& table);

/// Manifest document (schema "pforge-manifest/1").  Serialization is
/// byte-deterministic; parsing rejects unknown or malformed fields with
/// SchemaError.
std::string manifest_to_text(const Manifest& manifest);
Manifest manifest_from_text(const std::string& text);
void write_manifest_file(const std::filesystem::path& path,
                         const Manifest& manifest);
Manifest load_manifest_file(const std::filesystem::path& path);

}  // namespace pforge::run

#endif  // PFORGE_EXECUTE_HPP
