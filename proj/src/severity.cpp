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

#include "pforge/severity.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace pforge {

namespace detail {
const char* builtin_severity_table_text();
}

namespace {

struct KindInfo {
  PerturbationKind kind;
  const char* name;
  std::vector<std::string> params;
};

const std::array<KindInfo, kPerturbationKindCount>& kind_table() {
  static const std::array<KindInfo, kPerturbationKindCount> table = {{
      {PerturbationKind::kGaussianNoise, "gaussian_noise", {"sigma"}},
      {PerturbationKind::kShotNoise, "shot_noise", {"lambda"}},
      {PerturbationKind::kImpulseNoise, "impulse_noise", {"p"}},
      {PerturbationKind::kSpeckleNoise, "speckle_noise", {"rho"}},
      {PerturbationKind::kDefocusBlur, "defocus_blur", {"radius"}},
      {PerturbationKind::kGlassBlur, "glass_blur", {"delta", "iterations", "sigma"}},
      {PerturbationKind::kMotionBlur, "motion_blur", {"length"}},
      {PerturbationKind::kGaussianBlur, "gaussian_blur", {"sigma"}},
      {PerturbationKind::kSnow, "snow", {"alpha", "density"}},
      {PerturbationKind::kFrost, "frost", {"alpha", "cell"}},
      {PerturbationKind::kFog, "fog", {"alpha"}},
      {PerturbationKind::kSpatter, "spatter", {"alpha", "coverage"}},
      {PerturbationKind::kBrightness, "brightness", {"offset"}},
      {PerturbationKind::kContrast, "contrast", {"alpha"}},
      {PerturbationKind::kJpegCompression, "jpeg_compression", {"quality"}},
      {PerturbationKind::kPixelate, "pixelate", {"block"}},
      {PerturbationKind::kDepthGaussianNoise, "depth_gaussian_noise", {"sigma"}},
      {PerturbationKind::kDepthEdgeErosion, "depth_edge_erosion", {"radius", "rho"}},
      {PerturbationKind::kDepthRandomMissing, "depth_random_missing", {"p"}},
      {PerturbationKind::kDepthRangeClipping, "depth_range_clipping", {"max", "min"}},
      {PerturbationKind::kRotationDeviation, "rotation_deviation", {"sigma_deg"}},
      {PerturbationKind::kTranslationDeviation, "translation_deviation", {"sigma_m"}},
      {PerturbationKind::kFasterMotion, "faster_motion", {"k"}},
      {PerturbationKind::kSensorMisalignment, "sensor_misalignment", {"k"}},
      {PerturbationKind::kExtrinsicBaseline, "extrinsic_baseline", {"sigma_m"}},
  }};
  return table;
}

const KindInfo& info_for(PerturbationKind kind) {
  return kind_table()[static_cast<std::size_t>(kind)];
}

}  // namespace

std::string_view to_string(PerturbationKind kind) {
  return info_for(kind).name;
}

std::string_view to_string(SeverityLevel level) {
  switch (level) {
    case SeverityLevel::kLow:
      return "low";
    case SeverityLevel::kMedium:
      return "medium";
    case SeverityLevel::kHigh:
      return "high";
  }
  throw InvalidParameter("bad severity level value");
}

std::string_view to_string(PerturbationMode mode) {
  return mode == PerturbationMode::kStatic ? "static" : "dynamic";
}

PerturbationKind parse_kind(std::string_view name) {
  for (const auto& info : kind_table()) {
    if (name == info.name) {
      return info.kind;
    }
  }
  throw SchemaError("unknown perturbation kind '" + std::string(name) + "'");
}

SeverityLevel parse_level(std::string_view name) {
  if (name == "low") return SeverityLevel::kLow;
  if (name == "medium") return SeverityLevel::kMedium;
  if (name == "high") return SeverityLevel::kHigh;
  throw SchemaError("unknown severity level '" + std::string(name) + "'");
}

PerturbationMode parse_mode(std::string_view name) {
  if (name == "static") return PerturbationMode::kStatic;
  if (name == "dynamic") return PerturbationMode::kDynamic;
  throw SchemaError("unknown perturbation mode '" + std::string(name) + "'");
}

const std::vector<PerturbationKind>& all_kinds() {
  static const std::vector<PerturbationKind> kinds = [] {
    std::vector<PerturbationKind> v;
    for (const auto& info : kind_table()) {
      v.push_back(info.kind);
    }
    return v;
  }();
  return kinds;
}

bool kind_is_rgb(PerturbationKind kind) {
  return static_cast<int>(kind) <= static_cast<int>(PerturbationKind::kPixelate);
}

bool kind_is_depth(PerturbationKind kind) {
  const int v = static_cast<int>(kind);
  return v >= static_cast<int>(PerturbationKind::kDepthGaussianNoise) &&
         v <= static_cast<int>(PerturbationKind::kDepthRangeClipping);
}

bool kind_is_trajectory(PerturbationKind kind) {
  const int v = static_cast<int>(kind);
  return v >= static_cast<int>(PerturbationKind::kRotationDeviation) &&
         v <= static_cast<int>(PerturbationKind::kFasterMotion);
}

bool kind_supports_dynamic(PerturbationKind kind) {
  return kind_is_rgb(kind) || kind == PerturbationKind::kSensorMisalignment;
}

const std::vector<std::string>& required_params(PerturbationKind kind) {
  return info_for(kind).params;
}

ParamSet::ParamSet(std::map<std::string, double> values)
    : values_(std::move(values)) {}

double ParamSet::get(const std::string& name) const {
  auto it = values_.find(name);
  if (it == values_.end()) {
    throw InvalidParameter("missing parameter '" + name + "'");
  }
  return it->second;
}

long ParamSet::get_int(const std::string& name) const {
  const double v = get(name);
  const double r = std::round(v);
  if (std::abs(v - r) > 1e-9) {
    throw InvalidParameter("parameter '" + name + "' must be an integer");
  }
  return static_cast<long>(r);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

void check_total(
    const std::map<std::pair<std::uint8_t, std::uint8_t>, ParamSet>& cells) {
  for (PerturbationKind kind : all_kinds()) {
    for (SeverityLevel level : kAllLevels) {
      const auto key = std::make_pair(static_cast<std::uint8_t>(kind),
                                      static_cast<std::uint8_t>(level));
      auto it = cells.find(key);
      const std::string cell = std::string(to_string(kind)) + "." +
                               std::string(to_string(level));
      if (it == cells.end()) {
        throw InvalidParameter("severity table is missing cell '" + cell + "'");
      }
      for (const std::string& param : required_params(kind)) {
        if (it->second.values().find(param) == it->second.values().end()) {
          throw InvalidParameter("severity table is missing '" + cell + "." +
                                 param + "'");
        }
      }
    }
  }
}

}  // namespace

SeverityTable SeverityTable::parse(std::string_view text) {
  SeverityTable table;
  std::map<std::pair<std::uint8_t, std::uint8_t>, std::map<std::string, double>>
      raw;
  bool saw_schema = false;

  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, eol == std::string_view::npos ? eol : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++lineno;

    line = trim(line);
    if (line.empty() || line.front() == '#') {
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw SchemaError("severity table line " + std::to_string(lineno) +
                        ": expected 'key = value'");
    }
    const std::string key{trim(line.substr(0, eq))};
    const std::string value{trim(line.substr(eq + 1))};

    if (key == "schema") {
      if (value != "pforge-severity/1") {
        throw SchemaError("unsupported severity table schema '" + value + "'");
      }
      saw_schema = true;
      continue;
    }

    const std::size_t d1 = key.find('.');
    const std::size_t d2 = d1 == std::string::npos ? d1 : key.find('.', d1 + 1);
    if (d1 == std::string::npos || d2 == std::string::npos) {
      throw SchemaError("severity table line " + std::to_string(lineno) +
                        ": key must be kind.level.param");
    }
    const PerturbationKind kind = parse_kind(key.substr(0, d1));
    const SeverityLevel level = parse_level(key.substr(d1 + 1, d2 - d1 - 1));
    const std::string param = key.substr(d2 + 1);
    if (param.empty()) {
      throw SchemaError("severity table line " + std::to_string(lineno) +
                        ": empty parameter name");
    }

    char* end = nullptr;
    const double num = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0' || !std::isfinite(num)) {
      throw SchemaError("severity table line " + std::to_string(lineno) +
                        ": bad numeric value '" + value + "'");
    }
    auto& cell = raw[{static_cast<std::uint8_t>(kind),
                      static_cast<std::uint8_t>(level)}];
    if (!cell.emplace(param, num).second) {
      throw SchemaError("severity table line " + std::to_string(lineno) +
                        ": duplicate key '" + key + "'");
    }
  }

  if (!saw_schema) {
    throw SchemaError("severity table is missing 'schema = pforge-severity/1'");
  }
  for (auto& [key, values] : raw) {
    table.cells_.emplace(key, ParamSet(std::move(values)));
  }
  check_total(table.cells_);
  return table;
}

SeverityTable SeverityTable::load(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    throw IoError("cannot open severity table '" + file.string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const SeverityTable& SeverityTable::builtin() {
  static const SeverityTable table = parse(detail::builtin_severity_table_text());
  return table;
}

SeverityTable SeverityTable::from_env_or_builtin() {
  const char* path = std::getenv("PERTURB_FORGE_SEVERITY_TABLE");
  if (path != nullptr && path[0] != '\0') {
    return load(path);
  }
  return builtin();
}

const ParamSet& SeverityTable::params(PerturbationKind kind,
                                      SeverityLevel level) const {
  auto it = cells_.find({static_cast<std::uint8_t>(kind),
                         static_cast<std::uint8_t>(level)});
  if (it == cells_.end()) {
    throw InvalidParameter("severity table has no cell for " +
                           std::string(to_string(kind)) + "." +
                           std::string(to_string(level)));
  }
  return it->second;
}

std::string SeverityTable::serialize() const {
  std::vector<std::string> lines;
  for (const auto& [key, params] : cells_) {
    const auto kind = static_cast<PerturbationKind>(key.first);
    const auto level = static_cast<SeverityLevel>(key.second);
    for (const auto& [name, value] : params.values()) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.17g", value);
      lines.push_back(std::string(to_string(kind)) + "." +
                      std::string(to_string(level)) + "." + name + " = " + buf);
    }
  }
  std::sort(lines.begin(), lines.end());
  std::string out = "schema = pforge-severity/1\n";
  for (const auto& line : lines) {
    out += line;
    out += '\n';
  }
  return out;
}

void PerturbationSpec::validate() const {
  if (mode == PerturbationMode::kDynamic && !kind_supports_dynamic(kind)) {
    throw UnsupportedMode("dynamic mode is not defined for kind '" +
                          std::string(to_string(kind)) + "'");
  }
}

}  // namespace pforge
