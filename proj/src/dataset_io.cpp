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

#include "pforge/dataset_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <utility>

#include "pforge/errors.hpp"
#include "pforge/geometry.hpp"
#include "pforge/image_codec.hpp"

namespace pforge::io {

namespace {

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot read " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) {
    throw IoError("read failure on " + path.string());
  }
  return buffer.str();
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out << text;
  out.flush();
  if (!out) {
    throw IoError("write failure on " + path.string());
  }
}

bool is_blank_or_comment(const std::string& line) {
  for (char c : line) {
    if (c == '#') {
      return true;
    }
    if (!std::isspace(static_cast<unsigned char>(c))) {
      return false;
    }
  }
  return true;
}

/// Splits a data line into whitespace-separated tokens.
std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream in(line);
  std::string token;
  while (in >> token) {
    tokens.push_back(std::move(token));
  }
  return tokens;
}

double parse_double_token(const std::string& token,
                          const std::filesystem::path& path,
                          std::size_t line_no) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    std::ostringstream msg;
    msg << path.string() << ":" << line_no << ": not a number: '" << token
        << "'";
    throw SchemaError(msg.str());
  }
  return value;
}

std::string format_fixed6(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.6f", v);
  return buffer;
}

std::string format_shortest(double v) {
  char buffer[64];
  const auto [ptr, ec] =
      std::to_chars(buffer, buffer + sizeof(buffer), v);
  if (ec != std::errc()) {
    throw IoError("could not format a number");
  }
  return std::string(buffer, ptr);
}

std::string frame_file_name(std::size_t index, double timestamp) {
  char buffer[96];
  std::snprintf(buffer, sizeof(buffer), "%06zu_%.6f.png", index, timestamp);
  return buffer;
}

std::vector<IndexEntry> load_index_file(const std::filesystem::path& root,
                                        const std::string& name) {
  const std::filesystem::path path = root / name;
  if (!std::filesystem::exists(path)) {
    throw LayoutError("missing index file " + path.string());
  }
  const std::string text = read_text_file(path);
  std::istringstream in(text);
  std::vector<IndexEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank_or_comment(line)) {
      continue;
    }
    const auto tokens = tokenize(line);
    if (tokens.size() != 2) {
      std::ostringstream msg;
      msg << path.string() << ":" << line_no
          << ": expected 'timestamp filename', got " << tokens.size()
          << " fields";
      throw SchemaError(msg.str());
    }
    IndexEntry entry;
    entry.timestamp = parse_double_token(tokens[0], path, line_no);
    entry.filename = tokens[1];
    if (!entries.empty() && entry.timestamp <= entries.back().timestamp) {
      std::ostringstream msg;
      msg << path.string() << ":" << line_no
          << ": timestamps must be strictly increasing";
      throw LayoutError(msg.str());
    }
    if (!std::filesystem::exists(root / entry.filename)) {
      throw LayoutError("listed file is missing: " +
                        (root / entry.filename).string());
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

}  // namespace

Trajectory load_trajectory_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  std::istringstream in(text);
  std::vector<Pose> poses;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank_or_comment(line)) {
      continue;
    }
    const auto tokens = tokenize(line);
    if (tokens.size() != 8) {
      std::ostringstream msg;
      msg << path.string() << ":" << line_no
          << ": expected 't tx ty tz qx qy qz qw', got " << tokens.size()
          << " fields";
      throw SchemaError(msg.str());
    }
    double v[8];
    for (std::size_t i = 0; i < 8; ++i) {
      v[i] = parse_double_token(tokens[i], path, line_no);
    }
    try {
      poses.emplace_back(
          v[0], Eigen::Vector3d(v[1], v[2], v[3]),
          Eigen::Quaterniond(v[7], v[4], v[5], v[6]));  // file order is xyzw
    } catch (const InvalidQuaternion& e) {
      std::ostringstream msg;
      msg << path.string() << ":" << line_no << ": " << e.what();
      throw SchemaError(msg.str());
    }
  }
  try {
    return Trajectory(std::move(poses));
  } catch (const InvalidParameter& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

void write_trajectory_file(const std::filesystem::path& path,
                           const Trajectory& trajectory) {
  std::ostringstream out;
  out << "# timestamp tx ty tz qx qy qz qw\n";
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    const Pose& pose = trajectory.at(i);
    const Eigen::Quaterniond q = canonical_quaternion(pose.orientation);
    out << format_fixed6(pose.timestamp) << ' '
        << format_fixed6(pose.position.x()) << ' '
        << format_fixed6(pose.position.y()) << ' '
        << format_fixed6(pose.position.z()) << ' ' << format_fixed6(q.x())
        << ' ' << format_fixed6(q.y()) << ' ' << format_fixed6(q.z()) << ' '
        << format_fixed6(q.w()) << '\n';
  }
  write_text_file(path, out.str());
}

SequenceIndex read_sequence_index(const std::filesystem::path& root) {
  if (!std::filesystem::is_directory(root)) {
    throw LayoutError("not a sequence directory: " + root.string());
  }
  SequenceIndex index;
  index.rgb = load_index_file(root, "rgb.txt");
  index.depth = load_index_file(root, "depth.txt");
  const std::filesystem::path gt = root / "groundtruth.txt";
  if (!std::filesystem::exists(gt)) {
    throw LayoutError("missing index file " + gt.string());
  }
  index.ground_truth = load_trajectory_file(gt);
  return index;
}

AssociatedIndex associate_sequence_index(const SequenceIndex& index) {
  std::vector<double> rgb_times, depth_times, gt_times;
  for (const auto& e : index.rgb) rgb_times.push_back(e.timestamp);
  for (const auto& e : index.depth) depth_times.push_back(e.timestamp);
  for (std::size_t i = 0; i < index.ground_truth.size(); ++i) {
    gt_times.push_back(index.ground_truth.at(i).timestamp);
  }

  const double tol = metrics::kAssociationTolerance;
  std::unordered_map<std::size_t, std::size_t> rgb_to_depth, rgb_to_pose;
  for (const auto& [r, d] : metrics::associate_series(rgb_times, depth_times, tol)) {
    rgb_to_depth.emplace(r, d);
  }
  for (const auto& [r, p] : metrics::associate_series(rgb_times, gt_times, tol)) {
    rgb_to_pose.emplace(r, p);
  }

  AssociatedIndex out;
  for (std::size_t r = 0; r < index.rgb.size(); ++r) {
    const auto d = rgb_to_depth.find(r);
    const auto p = rgb_to_pose.find(r);
    if (d == rgb_to_depth.end() || p == rgb_to_pose.end()) {
      continue;
    }
    AssociatedFrame frame;
    frame.timestamp = index.rgb[r].timestamp;
    frame.rgb_file = index.rgb[r].filename;
    frame.depth_file = index.depth[d->second].filename;
    frame.pose = index.ground_truth.at(p->second);
    out.frames.push_back(std::move(frame));
  }
  out.dropped_rgb = index.rgb.size() - out.frames.size();
  out.dropped_depth = index.depth.size() - out.frames.size();
  out.dropped_poses = index.ground_truth.size() - out.frames.size();
  return out;
}

LoadedSequence load_sequence(const std::filesystem::path& root,
                             double depth_scale) {
  const SequenceIndex index = read_sequence_index(root);
  const AssociatedIndex assoc = associate_sequence_index(index);

  LoadedSequence result;
  result.dropped_rgb = assoc.dropped_rgb;
  result.dropped_depth = assoc.dropped_depth;
  result.dropped_poses = assoc.dropped_poses;

  std::vector<Pose> poses;
  for (const AssociatedFrame& frame : assoc.frames) {
    const double t = frame.timestamp;
    try {
      const Rgb8Image rgb = decode_png_rgb8(read_file(root / frame.rgb_file));
      result.sequence.rgb.push_back(to_rgb_frame(rgb, t));
    } catch (const DecodeError& e) {
      throw DecodeError(frame.rgb_file + ": " + e.what());
    }
    try {
      const Gray16Image depth =
          decode_png_gray16(read_file(root / frame.depth_file));
      result.sequence.depth.push_back(dequantize_depth(depth, depth_scale, t));
    } catch (const DecodeError& e) {
      throw DecodeError(frame.depth_file + ": " + e.what());
    }
    // Matched poses ride the color timeline so the loaded sequence is
    // aligned for the perturbation stages.
    poses.emplace_back(t, frame.pose.position, frame.pose.orientation);
  }
  result.sequence.trajectory = Trajectory(std::move(poses));
  return result;
}

SequenceWriter::SequenceWriter(std::filesystem::path root, double depth_scale)
    : root_(std::move(root)), depth_scale_(depth_scale) {
  if (!(depth_scale_ > 0.0)) {
    throw InvalidParameter("depth scale must be positive");
  }
  std::error_code ec;
  std::filesystem::create_directories(root_ / "rgb", ec);
  if (!ec) {
    std::filesystem::create_directories(root_ / "depth", ec);
  }
  if (ec) {
    throw IoError("cannot create sequence layout under " + root_.string() +
                  ": " + ec.message());
  }
}

void SequenceWriter::add_frame(const RgbFrame& rgb, const DepthFrame& depth,
                               const Pose& pose) {
  if (finalized_) {
    throw InvalidParameter("sequence writer already finalized");
  }
  if (!rgb_entries_.empty() &&
      rgb.timestamp <= rgb_entries_.back().timestamp) {
    throw InvalidParameter("frames must arrive in ascending timestamp order");
  }
  const std::size_t index = rgb_entries_.size();

  const std::string rgb_name =
      "rgb/" + frame_file_name(index, rgb.timestamp);
  write_file(root_ / rgb_name, encode_png(to_rgb8(rgb)));
  rgb_entries_.push_back({rgb.timestamp, rgb_name});

  std::size_t clipped = 0;
  const Gray16Image raw = quantize_depth(depth, depth_scale_, &clipped);
  report_.depth_out_of_range += clipped;
  const std::string depth_name =
      "depth/" + frame_file_name(index, depth.timestamp);
  write_file(root_ / depth_name, encode_png(raw));
  depth_entries_.push_back({depth.timestamp, depth_name});

  poses_.push_back(pose);
  ++report_.frames;
}

void SequenceWriter::add_frame_bytes(double timestamp,
                                     const std::vector<std::uint8_t>& rgb_png,
                                     const std::vector<std::uint8_t>& depth_png,
                                     const Pose& pose) {
  if (finalized_) {
    throw InvalidParameter("sequence writer already finalized");
  }
  if (!rgb_entries_.empty() &&
      timestamp <= rgb_entries_.back().timestamp) {
    throw InvalidParameter("frames must arrive in ascending timestamp order");
  }
  const std::size_t index = rgb_entries_.size();
  const std::string base = frame_file_name(index, timestamp);

  const std::string rgb_name = "rgb/" + base;
  write_file(root_ / rgb_name, rgb_png);
  rgb_entries_.push_back({timestamp, rgb_name});

  const std::string depth_name = "depth/" + base;
  write_file(root_ / depth_name, depth_png);
  depth_entries_.push_back({timestamp, depth_name});

  poses_.push_back(pose);
  ++report_.frames;
}

WriteReport SequenceWriter::finalize() {
  if (finalized_) {
    throw InvalidParameter("sequence writer already finalized");
  }
  finalized_ = true;

  auto write_index = [&](const std::string& name,
                         const std::vector<IndexEntry>& entries,
                         const char* header) {
    std::ostringstream out;
    out << "# " << header << "\n# timestamp filename\n";
    for (const IndexEntry& e : entries) {
      out << format_fixed6(e.timestamp) << ' ' << e.filename << '\n';
    }
    write_text_file(root_ / name, out.str());
  };
  write_index("rgb.txt", rgb_entries_, "color images");
  write_index("depth.txt", depth_entries_, "depth maps");
  write_trajectory_file(root_ / "groundtruth.txt", Trajectory(poses_));
  return report_;
}

WriteReport write_sequence(const SensorSequence& seq,
                           const std::filesystem::path& root,
                           double depth_scale) {
  require_aligned(seq);
  SequenceWriter writer(root, depth_scale);
  for (std::size_t i = 0; i < seq.rgb.size(); ++i) {
    writer.add_frame(seq.rgb[i], seq.depth[i], seq.trajectory.at(i));
  }
  return writer.finalize();
}

metrics::PointCloud load_xyz_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  std::istringstream in(text);
  metrics::PointCloud cloud;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank_or_comment(line)) {
      continue;
    }
    const auto tokens = tokenize(line);
    if (tokens.size() != 3) {
      std::ostringstream msg;
      msg << path.string() << ":" << line_no << ": expected 'x y z', got "
          << tokens.size() << " fields";
      throw SchemaError(msg.str());
    }
    cloud.emplace_back(parse_double_token(tokens[0], path, line_no),
                       parse_double_token(tokens[1], path, line_no),
                       parse_double_token(tokens[2], path, line_no));
  }
  return cloud;
}

void write_xyz_file(const std::filesystem::path& path,
                    const metrics::PointCloud& cloud) {
  std::ostringstream out;
  for (const auto& p : cloud) {
    out << format_shortest(p.x()) << ' ' << format_shortest(p.y()) << ' '
        << format_shortest(p.z()) << '\n';
  }
  write_text_file(path, out.str());
}

}  // namespace pforge::io
