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

#ifndef PFORGE_MISALIGN_HPP
#define PFORGE_MISALIGN_HPP

#include <cstdint>

#include "pforge/types.hpp"

namespace pforge {

enum class ShiftedStream : std::uint8_t { kRgb, kDepth };

/// Desynchronizes one stream of an aligned sequence.
///
/// Output frame i keeps the reference timeline's timestamp t_i, the
/// unshifted stream's frame i, and the ground-truth pose i, but the shifted
/// stream's CONTENT comes from source index i + k_i.  With jitter == 0 every
/// k_i equals delay_frames; with jitter j > 0, k_i is drawn uniformly from
/// [delay_frames - j, delay_frames + j] per output frame.  The sequence
/// shrinks to N - delay_frames - jitter frames so every offset stays in
/// bounds.
struct MisalignSpec {
  int delay_frames = 0;
  int jitter = 0;
  ShiftedStream shifted = ShiftedStream::kRgb;
  std::uint64_t seed = 0;

  /// Throws InvalidParameter unless delay_frames >= 0 and
  /// 0 <= jitter <= delay_frames.
  void validate() const;
};

/// Throws DelayExceedsSequence when delay_frames + jitter >= sequence length.
SensorSequence apply_misalignment(const SensorSequence& seq,
                                  const MisalignSpec& spec);

}  // namespace pforge

#endif  // PFORGE_MISALIGN_HPP
