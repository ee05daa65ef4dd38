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

#ifndef PFORGE_DATASET_IO_HPP
#define PFORGE_DATASET_IO_HPP

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "pforge/metrics.hpp"
#include "pforge/types.hpp"

namespace pforge::io {

/// Raw depth units per meter in 16-bit depth images.
inline constexpr double kDefaultDepthScale = 5000.0;

// ---------------------------------------------------------------------------
// Trajectory text files.  One pose per line: "t tx ty tz qx qy qz qw",
// '#' comments and blank lines ignored.  Written with six decimal places
// and the quaternion canonicalized to qw >= 0.
// ---------------------------------------------------------------------------

/// Parses a trajectory file.  Throws SchemaError (with the line number) on
/// malformed lines, IoError when the file cannot be read.  An empty file
/// yields an empty trajectory.
Trajectory load_trajectory_file(const std::filesystem::path& path);

void write_trajectory_file(const std::filesystem::path& path,
                           const Trajectory& trajectory);

// ---------------------------------------------------------------------------
// Sequence directory layout:
//
//   root/
//     rgb/<name>.png       8-bit RGB color frames
//     depth/<name>.png     16-bit single-channel depth, meters * scale
//     rgb.txt              "timestamp filename" per frame, time-sorted
//     depth.txt            likewise
//     groundtruth.txt      trajectory text file
//
// Index filenames are relative to the root.  Raw depth 0 encodes a missing
// reading.
// ---------------------------------------------------------------------------

struct IndexEntry {
  double timestamp = 0.0;
  std::string filename;  // as listed, relative to the sequence root
};

struct SequenceIndex {
  std::vector<IndexEntry> rgb;
  std::vector<IndexEntry> depth;
  Trajectory ground_truth;
};

/// Reads the three index files.  Throws LayoutError when an index file is
/// missing, a listed image file does not exist, or timestamps are not
/// strictly increasing; SchemaError on malformed lines.
SequenceIndex read_sequence_index(const std::filesystem::path& root);

/// One frame triple after cross-stream association.
struct AssociatedFrame {
  double timestamp = 0.0;  // the color frame's timestamp (reference)
  std::string rgb_file;
  std::string depth_file;
  Pose pose;
};

struct AssociatedIndex {
  std::vector<AssociatedFrame> frames;
  std::size_t dropped_rgb = 0;
  std::size_t dropped_depth = 0;
  std::size_t dropped_poses = 0;
};

/// Pairs color frames with depth frames and poses by nearest timestamp
/// within the matching window.  The color timeline is the reference: each
/// matched triple carries the color timestamp.  Unmatched frames and poses
/// are dropped and counted.
AssociatedIndex associate_sequence_index(const SequenceIndex& index);

struct LoadedSequence {
  SensorSequence sequence;
  std::size_t dropped_rgb = 0;
  std::size_t dropped_depth = 0;
  std::size_t dropped_poses = 0;
};

/// Loads and decodes a sequence.  Matched depth frames and poses are
/// restamped to the color timestamp so the result is aligned for the
/// perturbation pipeline.  Throws DecodeError naming the offending file.
LoadedSequence load_sequence(const std::filesystem::path& root,
                             double depth_scale = kDefaultDepthScale);

struct WriteReport {
  std::size_t frames = 0;
  std::size_t depth_out_of_range = 0;  // readings written as missing
};

/// Streaming sequence writer.  Frames must be added in ascending timestamp
/// order; files are named {index:06}_{timestamp:.6f}.png.  Index files
/// appear on finalize(), which must be called exactly once.
class SequenceWriter {
 public:
  SequenceWriter(std::filesystem::path root,
                 double depth_scale = kDefaultDepthScale);

  /// Encodes and writes one frame triple.
  void add_frame(const RgbFrame& rgb, const DepthFrame& depth,
                 const Pose& pose);

  /// Writes one frame triple from already-encoded image bytes (verbatim
  /// copy path).  The timestamp names the files and stamps the index.
  void add_frame_bytes(double timestamp,
                       const std::vector<std::uint8_t>& rgb_png,
                       const std::vector<std::uint8_t>& depth_png,
                       const Pose& pose);

  WriteReport finalize();

 private:
  std::filesystem::path root_;
  double depth_scale_;
  std::vector<IndexEntry> rgb_entries_;
  std::vector<IndexEntry> depth_entries_;
  std::vector<Pose> poses_;
  WriteReport report_;
  bool finalized_ = false;
};

/// Writes a whole in-memory sequence (SequenceWriter convenience).
WriteReport write_sequence(const SensorSequence& seq,
                           const std::filesystem::path& root,
                           double depth_scale = kDefaultDepthScale);

// ---------------------------------------------------------------------------
// Point-cloud text files: one "x y z" line per point.
// ---------------------------------------------------------------------------

metrics::PointCloud load_xyz_file(const std::filesystem::path& path);
void write_xyz_file(const std::filesystem::path& path,
                    const metrics::PointCloud& cloud);

}  // namespace pforge::io

#endif  // PFORGE_DATASET_IO_HPP
