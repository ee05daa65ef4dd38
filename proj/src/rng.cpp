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

#include "pforge/rng.hpp"

#include <cmath>

#include "pforge/errors.hpp"

namespace pforge {

std::uint64_t mix_u64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t frame,
                     std::uint64_t kind, RngLane lane) {
  // Fold the path into the key one component at a time.  Each fold passes
  // through the full mixer, so (seed=1, frame=0) and (seed=0, frame=1)
  // land far apart.
  std::uint64_t k = mix_u64(seed);
  k = mix_u64(k ^ frame);
  k = mix_u64(k ^ kind);
  k = mix_u64(k ^ static_cast<std::uint64_t>(lane));
  key_ = k;
}

std::uint64_t RngStream::next_u64() {
  return mix_u64(key_ ^ mix_u64(counter_++));
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::uniform_below(std::uint64_t n) {
  if (n == 0) {
    throw InvalidParameter("uniform_below requires n > 0");
  }
  // Rejection over a whole number of residue groups keeps the result
  // exactly uniform.
  const std::uint64_t bound = (~0ull / n) * n;
  std::uint64_t v = next_u64();
  while (v >= bound) {
    v = next_u64();
  }
  return v % n;
}

double RngStream::gaussian() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  return r * std::cos(2.0 * M_PI * u2);
}

std::int64_t RngStream::poisson(double lambda) {
  if (!(lambda > 0.0)) {
    return 0;
  }
  std::int64_t total = 0;
  while (lambda > 500.0) {
    total += poisson_chunk(500.0);
    lambda -= 500.0;
  }
  total += poisson_chunk(lambda);
  return total;
}

std::int64_t RngStream::poisson_chunk(double lambda) {
  const double limit = std::exp(-lambda);
  double product = 1.0;
  std::int64_t count = -1;
  do {
    product *= uniform();
    ++count;
  } while (product > limit);
  return count;
}

}  // namespace pforge
