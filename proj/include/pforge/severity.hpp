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

#ifndef PFORGE_SEVERITY_HPP
#define PFORGE_SEVERITY_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "pforge/errors.hpp"

namespace pforge {

/// The full perturbation taxonomy: 16 RGB kinds, 4 depth kinds, 3 trajectory
/// kinds, sensor misalignment, and the stereo extrinsic deviation.
enum class PerturbationKind : std::uint8_t {
  // RGB: noise
  kGaussianNoise,
  kShotNoise,
  kImpulseNoise,
  kSpeckleNoise,
  // RGB: blur
  kDefocusBlur,
  kGlassBlur,
  kMotionBlur,
  kGaussianBlur,
  // RGB: environment
  kSnow,
  kFrost,
  kFog,
  kSpatter,
  // RGB: post-processing
  kBrightness,
  kContrast,
  kJpegCompression,
  kPixelate,
  // Depth
  kDepthGaussianNoise,
  kDepthEdgeErosion,
  kDepthRandomMissing,
  kDepthRangeClipping,
  // Trajectory
  kRotationDeviation,
  kTranslationDeviation,
  kFasterMotion,
  // Cross-stream
  kSensorMisalignment,
  kExtrinsicBaseline,
};

inline constexpr int kPerturbationKindCount = 25;

enum class SeverityLevel : std::uint8_t { kLow, kMedium, kHigh };
inline constexpr SeverityLevel kAllLevels[] = {
    SeverityLevel::kLow, SeverityLevel::kMedium, SeverityLevel::kHigh};

/// Static: one severity for the whole sequence.  Dynamic: the severity is
/// re-drawn per frame from {low, medium, high}.
enum class PerturbationMode : std::uint8_t { kStatic, kDynamic };

std::string_view to_string(PerturbationKind kind);
std::string_view to_string(SeverityLevel level);
std::string_view to_string(PerturbationMode mode);
PerturbationKind parse_kind(std::string_view name);
SeverityLevel parse_level(std::string_view name);
PerturbationMode parse_mode(std::string_view name);

/// All 25 kinds in enum order.
const std::vector<PerturbationKind>& all_kinds();

bool kind_is_rgb(PerturbationKind kind);
bool kind_is_depth(PerturbationKind kind);
bool kind_is_trajectory(PerturbationKind kind);

/// Stable numeric id used in random stream paths.  Equals the enum value;
/// new kinds must only ever be appended.
inline std::uint64_t kind_id(PerturbationKind kind) {
  return static_cast<std::uint64_t>(kind);
}

/// Dynamic mode only makes sense where severity can change frame to frame
/// without breaking the stream: the RGB kinds and sensor misalignment.
bool kind_supports_dynamic(PerturbationKind kind);

/// Resolved numeric parameters for one (kind, level) cell.
class ParamSet {
 public:
  ParamSet() = default;
  explicit ParamSet(std::map<std::string, double> values);

  /// Throws InvalidParameter when the parameter is missing.
  double get(const std::string& name) const;
  /// get() rounded to the nearest integer; throws when not integral.
  long get_int(const std::string& name) const;

  const std::map<std::string, double>& values() const { return values_; }
  bool operator==(const ParamSet& other) const = default;

 private:
  std::map<std::string, double> values_;
};

/// Maps every (kind, level) to its parameters.  Total by construction: the
/// loader and the built-in table both reject missing cells or parameters,
/// so lookups never fail at perturb time.
class SeverityTable {
 public:
  /// The compiled-in default.
  static const SeverityTable& builtin();

  /// Parses the text format: `<kind>.<level>.<param> = <value>` lines, `#`
  /// comments, and a leading `schema = pforge-severity/1` marker.  Throws
  /// SchemaError on syntax problems and InvalidParameter when a required
  /// cell or parameter is absent, naming the offender.
  static SeverityTable parse(std::string_view text);
  static SeverityTable load(const std::filesystem::path& file);

  /// builtin() unless the PERTURB_FORGE_SEVERITY_TABLE environment variable
  /// names a file, which is then loaded instead.
  static SeverityTable from_env_or_builtin();

  const ParamSet& params(PerturbationKind kind, SeverityLevel level) const;

  /// Canonical text form: sorted lines, schema marker first.  parse() of the
  /// result reproduces the table exactly.
  std::string serialize() const;

  bool operator==(const SeverityTable& other) const = default;

 private:
  std::map<std::pair<std::uint8_t, std::uint8_t>, ParamSet> cells_;
};

/// The parameter names each kind consumes from its severity cell.
const std::vector<std::string>& required_params(PerturbationKind kind);

/// A fully specified perturbation to apply to one sequence.
struct PerturbationSpec {
  PerturbationKind kind = PerturbationKind::kGaussianNoise;
  SeverityLevel severity = SeverityLevel::kMedium;
  PerturbationMode mode = PerturbationMode::kStatic;
  std::uint64_t seed = 0;

  /// Throws UnsupportedMode for dynamic mode on a kind that cannot vary per
  /// frame.
  void validate() const;
};

}  // namespace pforge

#endif  // PFORGE_SEVERITY_HPP
