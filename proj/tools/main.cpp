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

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pforge/dataset_io.hpp"
#include "pforge/errors.hpp"
#include "pforge/execute.hpp"
#include "pforge/metrics.hpp"
#include "pforge/plan.hpp"
#include "pforge/severity.hpp"

namespace {

using Json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitPartial = 3;

std::string fixed6(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.6f", v);
  return buffer;
}

void print_effective_seed(std::uint64_t seed) {
  std::cerr << "effective seed: " << seed << "\n";
}

// ---------------------------------------------------------------- plan

struct PlanArgs {
  std::vector<std::string> scenes;
  std::string out;
};

int cmd_plan(const PlanArgs& args, std::uint64_t seed) {
  print_effective_seed(seed);
  const pforge::plan::BenchmarkPlan plan =
      pforge::plan::build_plan(args.scenes, seed);
  pforge::plan::write_plan_file(args.out, plan);
  const pforge::plan::CategoryCounts counts = plan.counts();
  std::cout << "plan written to " << args.out << "\n"
            << "entries " << counts.total() << "\n"
            << "clean " << counts.clean << "\n"
            << "image " << counts.image << "\n"
            << "depth " << counts.depth << "\n"
            << "faster_motion " << counts.faster_motion << "\n"
            << "trajectory " << counts.trajectory << "\n"
            << "misalignment " << counts.misalignment << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- perturb

struct PerturbArgs {
  std::string plan_file;
  std::string spec_text;
  std::string src;
  std::string out;
  int jobs = 1;
  double depth_scale = pforge::io::kDefaultDepthScale;
};

/// Parses "kind:severity:mode[:seed]" into a single-entry plan.
pforge::plan::BenchmarkPlan spec_to_plan(const std::string& text,
                                         const std::string& scene,
                                         std::optional<std::uint64_t> seed) {
  std::vector<std::string> parts;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ':')) {
    parts.push_back(token);
  }
  if (parts.size() != 3 && parts.size() != 4) {
    throw pforge::UsageError(
        "--spec wants kind:severity:mode[:seed], got '" + text + "'");
  }
  const pforge::PerturbationKind kind = pforge::parse_kind(parts[0]);
  const pforge::SeverityLevel level = pforge::parse_level(parts[1]);
  const pforge::PerturbationMode mode = pforge::parse_mode(parts[2]);
  std::uint64_t entry_seed = seed.value_or(0);
  if (parts.size() == 4) {
    try {
      entry_seed = std::stoull(parts[3]);
    } catch (const std::exception&) {
      throw pforge::UsageError("--spec seed must be an unsigned integer");
    }
  }

  pforge::plan::PlanEntry entry;
  entry.scene = scene;
  entry.seed = entry_seed;
  const std::string mode_name(pforge::to_string(mode));
  const std::string level_name(pforge::to_string(level));
  const std::string kind_name(pforge::to_string(kind));
  if (pforge::kind_is_rgb(kind) || pforge::kind_is_depth(kind)) {
    entry.category = pforge::kind_is_rgb(kind)
                         ? pforge::plan::Category::kImage
                         : pforge::plan::Category::kDepth;
    entry.id = scene + "/" + kind_name + "/" + level_name + "/" + mode_name;
    pforge::PerturbationSpec spec;
    spec.kind = kind;
    spec.severity = level;
    spec.mode = mode;
    spec.seed = entry_seed;
    spec.validate();
    entry.spec = spec;
  } else if (kind == pforge::PerturbationKind::kRotationDeviation ||
             kind == pforge::PerturbationKind::kTranslationDeviation) {
    if (mode != pforge::PerturbationMode::kStatic) {
      throw pforge::UnsupportedMode(
          "trajectory perturbations support static mode only");
    }
    entry.category = pforge::plan::Category::kTrajectory;
    entry.id = scene + "/" + kind_name + "/" + level_name;
    pforge::plan::TrajectoryRecipe recipe;
    if (kind == pforge::PerturbationKind::kRotationDeviation) {
      recipe.rotation = level;
    } else {
      recipe.translation = level;
    }
    entry.trajectory = recipe;
  } else if (kind == pforge::PerturbationKind::kFasterMotion) {
    if (mode != pforge::PerturbationMode::kStatic) {
      throw pforge::UnsupportedMode("faster motion supports static mode only");
    }
    entry.category = pforge::plan::Category::kFasterMotion;
    entry.id = scene + "/" + kind_name + "/" + level_name;
    entry.faster = level;
  } else if (kind == pforge::PerturbationKind::kSensorMisalignment) {
    entry.category = pforge::plan::Category::kMisalignment;
    entry.id = scene + "/" + kind_name + "/" + mode_name + "/" + level_name;
    entry.misalignment = pforge::plan::MisalignRecipe{mode, level};
  } else {
    throw pforge::UsageError("kind '" + kind_name +
                             "' cannot be applied through --spec");
  }

  pforge::plan::BenchmarkPlan plan;
  plan.master_seed = entry_seed;
  plan.entries.push_back(std::move(entry));
  return plan;
}

int cmd_perturb(const PerturbArgs& args, std::optional<std::uint64_t> seed) {
  const pforge::SeverityTable table =
      pforge::SeverityTable::from_env_or_builtin();

  pforge::plan::BenchmarkPlan plan;
  pforge::run::ExecuteOptions options;
  options.output_root = args.out;
  options.jobs = args.jobs;
  options.depth_scale = args.depth_scale;

  if (!args.plan_file.empty()) {
    plan = pforge::plan::load_plan_file(args.plan_file);
    if (seed.has_value() && *seed != plan.master_seed) {
      // A command-line seed re-derives every entry seed, as if the plan had
      // been generated under it.
      plan.master_seed = *seed;
      for (pforge::plan::PlanEntry& entry : plan.entries) {
        entry.seed = pforge::plan::derive_entry_seed(*seed, entry.id);
        if (entry.spec.has_value()) {
          entry.spec->seed = entry.seed;
        }
      }
    }
    options.source_root = args.src;
  } else {
    const std::filesystem::path src(args.src);
    const std::string scene = src.filename().string().empty()
                                  ? src.parent_path().filename().string()
                                  : src.filename().string();
    plan = spec_to_plan(args.spec_text, scene, seed);
    options.source_root = src.has_parent_path() ? src.parent_path()
                                                : std::filesystem::path(".");
  }
  print_effective_seed(plan.master_seed);

  const pforge::run::Manifest manifest =
      pforge::run::execute_plan(plan, options, table);
  const std::filesystem::path manifest_path =
      options.output_root / "manifest.json";
  pforge::run::write_manifest_file(manifest_path, manifest);

  const std::size_t failures = manifest.failures();
  for (const pforge::run::EntryResult& e : manifest.entries) {
    if (!e.ok) {
      std::cout << "failed: " << e.id << ": " << e.error << "\n";
    }
  }
  std::cout << "materialized " << (manifest.entries.size() - failures)
            << " of " << manifest.entries.size() << " entries\n"
            << "manifest written to " << manifest_path.string() << "\n";
  return failures == 0 ? kExitOk : kExitPartial;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string est;
  std::string gt;
  std::string align = "none";
  std::string metrics = "ate,sr";
  std::string format = "text";
};

pforge::metrics::Alignment parse_align(const std::string& name) {
  if (name == "none") return pforge::metrics::Alignment::kNone;
  if (name == "rigid") return pforge::metrics::Alignment::kRigid;
  if (name == "sim3") return pforge::metrics::Alignment::kSimilarity;
  throw pforge::UsageError("--align wants none, rigid, or sim3");
}

int cmd_evaluate(const EvaluateArgs& args, std::uint64_t seed) {
  print_effective_seed(seed);
  const pforge::metrics::Alignment align = parse_align(args.align);

  bool want_ate = false;
  bool want_sr = false;
  {
    std::istringstream in(args.metrics);
    std::string token;
    while (std::getline(in, token, ',')) {
      if (token == "ate") {
        want_ate = true;
      } else if (token == "sr") {
        want_sr = true;
      } else if (!token.empty()) {
        throw pforge::UsageError("--metrics wants a subset of: ate,sr");
      }
    }
    if (!want_ate && !want_sr) {
      throw pforge::UsageError("--metrics selected nothing");
    }
  }

  const pforge::Trajectory est = pforge::io::load_trajectory_file(args.est);
  const pforge::Trajectory gt = pforge::io::load_trajectory_file(args.gt);

  double ate = pforge::metrics::kFailureAte;
  double sr = pforge::metrics::kFailureSr;
  std::size_t pairs = 0;
  bool failure = false;

  if (est.empty()) {
    // An empty estimate is a legitimate outcome: the tracked run lost the
    // trajectory entirely and is scored with the failure policy.
    failure = true;
  } else {
    if (want_ate) {
      const pforge::metrics::AteReport report =
          pforge::metrics::compute_ate(est, gt, align);
      ate = report.ate;
      pairs = report.pairs;
    }
    if (want_sr) {
      const pforge::metrics::SrReport report =
          pforge::metrics::compute_sr(est, gt);
      sr = report.sr;
      pairs = std::max(pairs, report.pairs);
    }
  }

  if (args.format == "structured") {
    Json j;
    j["schema"] = "pforge-evaluation/1";
    j["align"] = args.align;
    j["failure"] = failure;
    j["pairs"] = pairs;
    if (want_ate) j["ate"] = ate;
    if (want_sr) j["sr"] = sr;
    std::cout << j.dump(2) << "\n";
  } else if (args.format == "text") {
    if (failure) {
      std::cout << "failure true\n";
    }
    std::cout << "pairs " << pairs << "\n";
    if (want_ate) std::cout << "ate " << fixed6(ate) << "\n";
    if (want_sr) std::cout << "sr " << fixed6(sr) << "\n";
  } else {
    throw pforge::UsageError("--format wants text or structured");
  }
  return kExitOk;
}

// ---------------------------------------------------------------- report

struct ReportArgs {
  std::string manifest;
  std::string results;
  std::string data;  // defaults to the manifest's directory
  std::string align = "none";
  std::vector<double> thresholds = {0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0};
  std::string format = "text";
  std::string out;  // optional structured output file
};

struct RunOutcome {
  std::string id;
  std::string category;
  std::string setting;  // id without the scene prefix
  double ate = pforge::metrics::kFailureAte;
  double sr = pforge::metrics::kFailureSr;
  bool failed = true;
  std::string note;
};

struct GroupStats {
  std::size_t runs = 0;
  std::size_t failures = 0;
  double mean_ate = 0.0;
  double max_ate = 0.0;
  double mean_sr = 0.0;
  double min_sr = 0.0;
};

GroupStats stats_of(const std::vector<const RunOutcome*>& runs) {
  std::vector<pforge::metrics::SettingResult> results;
  results.reserve(runs.size());
  for (const RunOutcome* run : runs) {
    pforge::metrics::SettingResult r;
    r.ate = run->ate;
    r.sr = run->sr;
    r.failed = run->failed;
    results.push_back(r);
  }
  const pforge::metrics::AggregateReport agg =
      pforge::metrics::aggregate(results);
  GroupStats stats;
  stats.runs = agg.total;
  stats.failures = agg.failures;
  stats.mean_ate = agg.mean_ate;
  stats.max_ate = agg.max_ate;
  stats.mean_sr = agg.mean_sr;
  stats.min_sr = agg.min_sr;
  return stats;
}

std::vector<double> csr_curve(const std::vector<const RunOutcome*>& runs,
                              const std::vector<double>& thresholds) {
  std::vector<double> ates;
  ates.reserve(runs.size());
  for (const RunOutcome* run : runs) {
    ates.push_back(run->failed ? pforge::metrics::kFailureAte : run->ate);
  }
  std::vector<double> curve;
  curve.reserve(thresholds.size());
  for (double t : thresholds) {
    curve.push_back(pforge::metrics::compute_csr(ates, t));
  }
  return curve;
}

int cmd_report(const ReportArgs& args, std::uint64_t seed) {
  print_effective_seed(seed);
  for (double t : args.thresholds) {
    if (!(t > 0.0)) {
      throw pforge::UsageError("--csr-thresholds must all be positive");
    }
  }
  const pforge::metrics::Alignment align = parse_align(args.align);
  const pforge::run::Manifest manifest =
      pforge::run::load_manifest_file(args.manifest);
  const std::filesystem::path data_root =
      args.data.empty()
          ? std::filesystem::path(args.manifest).parent_path()
          : std::filesystem::path(args.data);
  const std::filesystem::path results_root(args.results);

  std::vector<RunOutcome> runs;
  runs.reserve(manifest.entries.size());
  for (const pforge::run::EntryResult& entry : manifest.entries) {
    RunOutcome run;
    run.id = entry.id;
    run.category = entry.category;
    const auto slash = entry.id.find('/');
    run.setting = slash == std::string::npos ? entry.id
                                             : entry.id.substr(slash + 1);
    if (!entry.ok) {
      run.note = "entry failed during generation";
      runs.push_back(std::move(run));
      continue;
    }
    const std::filesystem::path est_path =
        results_root / (entry.id + ".txt");
    if (!std::filesystem::exists(est_path)) {
      run.note = "missing result file";
      runs.push_back(std::move(run));
      continue;
    }
    try {
      const pforge::Trajectory est =
          pforge::io::load_trajectory_file(est_path);
      if (est.empty()) {
        run.note = "empty estimate: tracking failure";
        runs.push_back(std::move(run));
        continue;
      }
      const pforge::Trajectory gt = pforge::io::load_trajectory_file(
          data_root / entry.output / "groundtruth.txt");
      run.ate = pforge::metrics::compute_ate(est, gt, align).ate;
      run.sr = pforge::metrics::compute_sr(est, gt).sr;
      run.failed = false;
    } catch (const pforge::Error& e) {
      run.ate = pforge::metrics::kFailureAte;
      run.sr = pforge::metrics::kFailureSr;
      run.failed = true;
      run.note = e.what();
    }
    runs.push_back(std::move(run));
  }
  if (runs.empty()) {
    throw pforge::EmptyInput("manifest has no entries to report on");
  }

  // Group runs by category and by setting (id without the scene).
  std::vector<const RunOutcome*> all;
  std::map<std::string, std::vector<const RunOutcome*>> by_category;
  std::map<std::string, std::vector<const RunOutcome*>> by_setting;
  for (const RunOutcome& run : runs) {
    all.push_back(&run);
    by_category[run.category].push_back(&run);
    by_setting[run.setting].push_back(&run);
  }

  Json doc;
  doc["schema"] = "pforge-report/1";
  doc["align"] = args.align;
  const GroupStats overall = stats_of(all);
  auto stats_json = [](const GroupStats& s) {
    Json j;
    j["runs"] = s.runs;
    j["failures"] = s.failures;
    j["mean_ate"] = s.mean_ate;
    j["max_ate"] = s.max_ate;
    j["mean_sr"] = s.mean_sr;
    j["min_sr"] = s.min_sr;
    return j;
  };
  doc["overall"] = stats_json(overall);
  doc["categories"] = Json::object();
  for (const auto& [name, group] : by_category) {
    doc["categories"][name] = stats_json(stats_of(group));
  }
  doc["settings"] = Json::object();
  for (const auto& [name, group] : by_setting) {
    doc["settings"][name] = stats_json(stats_of(group));
  }
  doc["csr"] = Json::object();
  doc["csr"]["thresholds"] = args.thresholds;
  doc["csr"]["overall"] = csr_curve(all, args.thresholds);
  doc["csr"]["categories"] = Json::object();
  for (const auto& [name, group] : by_category) {
    doc["csr"]["categories"][name] = csr_curve(group, args.thresholds);
  }
  Json listed = Json::array();
  for (const RunOutcome& run : runs) {
    if (!run.note.empty()) {
      Json j;
      j["id"] = run.id;
      j["note"] = run.note;
      listed.push_back(std::move(j));
    }
  }
  doc["problems"] = std::move(listed);

  if (!args.out.empty()) {
    std::ofstream out(args.out, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw pforge::IoError("cannot write " + args.out);
    }
    out << doc.dump(2) << "\n";
  }

  if (args.format == "structured") {
    std::cout << doc.dump(2) << "\n";
    return kExitOk;
  }
  if (args.format != "text") {
    throw pforge::UsageError("--format wants text or structured");
  }

  auto print_stats_row = [](const std::string& name, const GroupStats& s) {
    std::printf("%-42s %5zu %5zu  %9.6f %9.6f  %9.6f %9.6f\n", name.c_str(),
                s.runs, s.failures, s.mean_ate, s.max_ate, s.mean_sr,
                s.min_sr);
  };
  std::printf("%-42s %5s %5s  %9s %9s  %9s %9s\n", "group", "runs", "fail",
              "mean_ate", "max_ate", "mean_sr", "min_sr");
  print_stats_row("overall", overall);
  for (const auto& [name, group] : by_category) {
    print_stats_row(name, stats_of(group));
  }
  std::printf("\nper-setting aggregates\n");
  for (const auto& [name, group] : by_setting) {
    print_stats_row(name, stats_of(group));
  }

  std::printf("\ncumulative success rate (%%)\n%-10s %8s", "threshold",
              "overall");
  for (const auto& [name, group] : by_category) {
    std::printf(" %14s", name.c_str());
  }
  std::printf("\n");
  const std::vector<double> overall_curve = csr_curve(all, args.thresholds);
  std::map<std::string, std::vector<double>> category_curves;
  for (const auto& [name, group] : by_category) {
    category_curves[name] = csr_curve(group, args.thresholds);
  }
  for (std::size_t i = 0; i < args.thresholds.size(); ++i) {
    std::printf("%-10.6f %8.3f", args.thresholds[i], overall_curve[i]);
    for (const auto& [name, curve] : category_curves) {
      std::printf(" %14.3f", curve[i]);
    }
    std::printf("\n");
  }
  for (const RunOutcome& run : runs) {
    if (!run.note.empty()) {
      std::printf("note: %s: %s\n", run.id.c_str(), run.note.c_str());
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic perturbation and evaluation toolkit for "
               "RGB-D SLAM sequences"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed;
  app.add_option("--seed", seed, "Seed override (applies to any command)");

  PlanArgs plan_args;
  CLI::App* plan_cmd =
      app.add_subcommand("plan", "Enumerate the benchmark plan");
  plan_cmd->add_option("--scenes", plan_args.scenes,
                       "Exactly eight scene names")
      ->delimiter(',')
      ->required();
  plan_cmd->add_option("--out", plan_args.out, "Plan file to write")
      ->required();

  PerturbArgs perturb_args;
  CLI::App* perturb_cmd = app.add_subcommand(
      "perturb", "Materialize perturbed sequences from a plan or one spec");
  auto* plan_opt = perturb_cmd->add_option(
      "--plan", perturb_args.plan_file, "Plan file produced by 'plan'");
  auto* spec_opt = perturb_cmd->add_option(
      "--spec", perturb_args.spec_text, "Inline recipe kind:severity:mode[:seed]");
  plan_opt->excludes(spec_opt);
  perturb_cmd->add_option("--src", perturb_args.src,
                          "Source root (plan mode) or sequence dir (spec mode)")
      ->required();
  perturb_cmd->add_option("--out", perturb_args.out, "Output root")
      ->required();
  perturb_cmd->add_option("--jobs", perturb_args.jobs,
                          "Parallel entries (output is identical for any value)")
      ->check(CLI::PositiveNumber);
  perturb_cmd->add_option("--depth-scale", perturb_args.depth_scale,
                          "Raw depth units per meter");

  EvaluateArgs eval_args;
  CLI::App* eval_cmd =
      app.add_subcommand("evaluate", "Score one estimated trajectory");
  eval_cmd->add_option("--est", eval_args.est, "Estimated trajectory file")
      ->required();
  eval_cmd->add_option("--gt", eval_args.gt, "Ground-truth trajectory file")
      ->required();
  eval_cmd->add_option("--align", eval_args.align,
                       "Alignment: none, rigid, or sim3");
  eval_cmd->add_option("--metrics", eval_args.metrics,
                       "Comma list from: ate,sr");
  eval_cmd->add_option("--format", eval_args.format, "text or structured");

  ReportArgs report_args;
  CLI::App* report_cmd = app.add_subcommand(
      "report", "Aggregate metrics over a manifest of runs");
  report_cmd->add_option("--manifest", report_args.manifest,
                         "Manifest file from 'perturb'")
      ->required();
  report_cmd->add_option("--results", report_args.results,
                         "Directory of estimated trajectories (<id>.txt)")
      ->required();
  report_cmd->add_option("--data", report_args.data,
                         "Perturbed data root (default: manifest directory)");
  report_cmd->add_option("--align", report_args.align,
                         "Alignment: none, rigid, or sim3");
  report_cmd->add_option("--csr-thresholds", report_args.thresholds,
                         "Success thresholds in meters")
      ->delimiter(',');
  report_cmd->add_option("--format", report_args.format,
                         "text or structured");
  report_cmd->add_option("--out", report_args.out,
                         "Also write the structured report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (plan_cmd->parsed()) {
      return cmd_plan(plan_args, seed.value_or(0));
    }
    if (perturb_cmd->parsed()) {
      if (perturb_args.plan_file.empty() && perturb_args.spec_text.empty()) {
        throw pforge::UsageError("perturb needs --plan or --spec");
      }
      return cmd_perturb(perturb_args, seed);
    }
    if (eval_cmd->parsed()) {
      return cmd_evaluate(eval_args, seed.value_or(0));
    }
    if (report_cmd->parsed()) {
      return cmd_report(report_args, seed.value_or(0));
    }
    throw pforge::UsageError("no command selected");
  } catch (const pforge::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const pforge::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}
