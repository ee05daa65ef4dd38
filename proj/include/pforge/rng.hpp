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

#ifndef PFORGE_RNG_HPP
#define PFORGE_RNG_HPP

#include <cstdint>

namespace pforge {

/// splitmix64 finalizer.  Bijective on 64-bit values, good avalanche.
std::uint64_t mix_u64(std::uint64_t x);

/// Names the independent random substreams an operation may consume for one
/// (seed, frame, kind) path.  Keeping lanes explicit means a new draw site
/// never shifts previously assigned values.
enum class RngLane : std::uint64_t {
  kDraw = 0,      // bulk per-element draws
  kSeverity = 1,  // per-frame severity resampling in dynamic mode
  kOffset = 2,    // per-frame delay offsets
  kShape = 3,     // kernel / layer construction
};

/// Counter-based deterministic random stream.
///
/// A stream is keyed by (seed, frame, kind, lane) and produces a sequence of
/// 64-bit words by hashing the key with a per-call counter.  Identical paths
/// give bitwise identical sequences on every platform and in any evaluation
/// order, which is what makes perturbed datasets reproducible from a single
/// master seed.  Streams with different paths are statistically independent.
///
/// There is no global state: construction is cheap, so callers make a fresh
/// stream per (frame, kind, lane) rather than sharing one across frames.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t frame = 0,
                     std::uint64_t kind = 0,
                     RngLane lane = RngLane::kDraw);

  /// Next raw 64-bit word.
  std::uint64_t next_u64();

  /// Uniform double in [0, 1), 53 random bits.
  double uniform();

  /// Uniform integer in [0, n).  n must be positive.
  std::uint64_t uniform_below(std::uint64_t n);

  /// Standard normal via the Box-Muller transform.  Consumes exactly two
  /// uniforms per call; the log argument is flipped to (0,1] so it never
  /// sees zero.
  double gaussian();

  /// Poisson-distributed count with the given mean, by Knuth's product
  /// method.  Large means are split into chunks of 500 to keep the running
  /// product away from underflow; the sum of independent Poisson draws is
  /// Poisson with the summed mean, so chunking does not change the law.
  /// Nonpositive lambda yields 0.
  std::int64_t poisson(double lambda);

  std::uint64_t counter() const { return counter_; }

 private:
  std::int64_t poisson_chunk(double lambda);

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace pforge

#endif  // PFORGE_RNG_HPP
