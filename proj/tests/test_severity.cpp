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

#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>

using namespace pforge;

TEST_CASE("the builtin table is total over kinds, levels, and parameters") {
  const SeverityTable& table = SeverityTable::builtin();
  for (PerturbationKind kind : all_kinds()) {
    for (SeverityLevel level : kAllLevels) {
      const ParamSet& params = table.params(kind, level);
      for (const std::string& name : required_params(kind)) {
        CHECK_NOTHROW((void)params.get(name));
      }
    }
  }
}

TEST_CASE("builtin parameters carry the shipped defaults") {
  const SeverityTable& t = SeverityTable::builtin();
  CHECK(t.params(PerturbationKind::kRotationDeviation, SeverityLevel::kLow)
            .get("sigma_deg") == 1.0);
  CHECK(t.params(PerturbationKind::kRotationDeviation, SeverityLevel::kHigh)
            .get("sigma_deg") == 5.0);
  CHECK(t.params(PerturbationKind::kTranslationDeviation, SeverityLevel::kLow)
            .get("sigma_m") == 0.0125);
  CHECK(t.params(PerturbationKind::kFasterMotion, SeverityLevel::kHigh)
            .get_int("k") == 8);
  CHECK(t.params(PerturbationKind::kSensorMisalignment, SeverityLevel::kMedium)
            .get_int("k") == 10);
  CHECK(t.params(PerturbationKind::kDepthRangeClipping, SeverityLevel::kLow)
            .get("min") == 0.42);
  CHECK(t.params(PerturbationKind::kDepthRangeClipping, SeverityLevel::kHigh)
            .get("max") == 10.0);
  CHECK(t.params(PerturbationKind::kDepthRandomMissing, SeverityLevel::kMedium)
            .get("p") == 0.10);
  CHECK(t.params(PerturbationKind::kJpegCompression, SeverityLevel::kHigh)
            .get_int("quality") == 10);
  CHECK(t.params(PerturbationKind::kExtrinsicBaseline, SeverityLevel::kLow)
            .get("sigma_m") == 0.001);
  CHECK(t.params(PerturbationKind::kExtrinsicBaseline, SeverityLevel::kHigh)
            .get("sigma_m") == 0.01);
}

TEST_CASE("serialize and parse round-trip the table") {
  const SeverityTable& t = SeverityTable::builtin();
  const std::string text = t.serialize();
  CHECK(text.rfind("schema = pforge-severity/1\n", 0) == 0);
  CHECK(SeverityTable::parse(text) == t);
  // Serialization is canonical, so a second pass is byte-identical.
  CHECK(SeverityTable::parse(text).serialize() == text);
}

TEST_CASE("parse rejects malformed tables with specific errors") {
  CHECK_THROWS_AS(SeverityTable::parse("gaussian_noise.low.sigma = 1\n"),
                  SchemaError);  // no schema marker
  CHECK_THROWS_AS(SeverityTable::parse("schema = pforge-severity/2\n"),
                  SchemaError);

  const std::string& base = SeverityTable::builtin().serialize();
  CHECK_THROWS_AS(SeverityTable::parse(base + "bogus_kind.low.x = 1\n"),
                  SchemaError);
  CHECK_THROWS_AS(SeverityTable::parse(base + "snow.wild.alpha = 1\n"),
                  SchemaError);
  CHECK_THROWS_AS(SeverityTable::parse(base + "snow.low.alpha = 1\n"),
                  SchemaError);  // duplicate
  CHECK_THROWS_AS(SeverityTable::parse(base + "snow.low.extra = alot\n"),
                  SchemaError);  // non-numeric
}

TEST_CASE("parse names the first missing cell") {
  // Drop every snow.medium line from the canonical text.
  const std::string base = SeverityTable::builtin().serialize();
  std::string pruned;
  for (std::size_t pos = 0; pos < base.size();) {
    std::size_t eol = base.find('\n', pos);
    if (eol == std::string::npos) eol = base.size();
    const std::string line = base.substr(pos, eol - pos);
    if (line.rfind("snow.medium.", 0) != 0) {
      pruned += line;
      pruned += '\n';
    }
    pos = eol + 1;
  }
  try {
    SeverityTable::parse(pruned);
    FAIL("expected InvalidParameter");
  } catch (const InvalidParameter& e) {
    CHECK(std::string(e.what()).find("snow.medium") != std::string::npos);
  }
}

TEST_CASE("a missing parameter inside a present cell is also named") {
  const std::string base = SeverityTable::builtin().serialize();
  std::string pruned;
  for (std::size_t pos = 0; pos < base.size();) {
    std::size_t eol = base.find('\n', pos);
    if (eol == std::string::npos) eol = base.size();
    const std::string line = base.substr(pos, eol - pos);
    if (line.rfind("glass_blur.high.sigma", 0) != 0) {
      pruned += line;
      pruned += '\n';
    }
    pos = eol + 1;
  }
  try {
    SeverityTable::parse(pruned);
    FAIL("expected InvalidParameter");
  } catch (const InvalidParameter& e) {
    CHECK(std::string(e.what()).find("glass_blur.high.sigma") !=
          std::string::npos);
  }
}

TEST_CASE("kind names round-trip and group queries partition the taxonomy") {
  int rgb = 0, depth = 0, traj = 0, other = 0;
  for (PerturbationKind kind : all_kinds()) {
    CHECK(parse_kind(to_string(kind)) == kind);
    if (kind_is_rgb(kind)) {
      ++rgb;
    } else if (kind_is_depth(kind)) {
      ++depth;
    } else if (kind_is_trajectory(kind)) {
      ++traj;
    } else {
      ++other;
    }
  }
  CHECK(rgb == 16);
  CHECK(depth == 4);
  CHECK(traj == 3);
  CHECK(other == 2);
  CHECK(all_kinds().size() == kPerturbationKindCount);
  CHECK_THROWS_AS(parse_kind("rainbow"), SchemaError);
  CHECK(parse_level("medium") == SeverityLevel::kMedium);
  CHECK_THROWS_AS(parse_level("extreme"), SchemaError);
  CHECK(parse_mode("dynamic") == PerturbationMode::kDynamic);
  CHECK_THROWS_AS(parse_mode("wobbly"), SchemaError);
}

TEST_CASE("dynamic mode is accepted exactly for RGB kinds and misalignment") {
  for (PerturbationKind kind : all_kinds()) {
    PerturbationSpec spec;
    spec.kind = kind;
    spec.mode = PerturbationMode::kDynamic;
    const bool ok = kind_is_rgb(kind) ||
                    kind == PerturbationKind::kSensorMisalignment;
    CHECK(kind_supports_dynamic(kind) == ok);
    if (ok) {
      CHECK_NOTHROW(spec.validate());
    } else {
      CHECK_THROWS_AS(spec.validate(), UnsupportedMode);
    }
    spec.mode = PerturbationMode::kStatic;
    CHECK_NOTHROW(spec.validate());
  }
}

TEST_CASE("param sets validate lookups") {
  const ParamSet params(std::map<std::string, double>{{"a", 2.0}, {"b", 2.5}});
  CHECK(params.get("a") == 2.0);
  CHECK(params.get_int("a") == 2);
  CHECK_THROWS_AS((void)params.get("absent"), InvalidParameter);
  CHECK_THROWS_AS((void)params.get_int("b"), InvalidParameter);
}

TEST_CASE("the environment variable overrides the builtin table") {
  // Write a copy with one value changed and point the env var at it.
  std::string text = SeverityTable::builtin().serialize();
  const std::string needle = "fog.high.alpha = 0.75";
  const std::size_t at = text.find(needle);
  REQUIRE(at != std::string::npos);
  text.replace(at, needle.size(), "fog.high.alpha = 0.99");

  const std::string path = "severity_override_test.txt";
  {
    std::ofstream out(path, std::ios::binary);
    out << text;
  }
  setenv("PERTURB_FORGE_SEVERITY_TABLE", path.c_str(), 1);
  const SeverityTable overridden = SeverityTable::from_env_or_builtin();
  unsetenv("PERTURB_FORGE_SEVERITY_TABLE");
  std::remove(path.c_str());

  CHECK(overridden.params(PerturbationKind::kFog, SeverityLevel::kHigh)
            .get("alpha") == 0.99);
  CHECK(SeverityTable::from_env_or_builtin() == SeverityTable::builtin());
}
