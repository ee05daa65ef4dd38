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

#ifndef PFORGE_DIGEST_HPP
#define PFORGE_DIGEST_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace pforge {

/// SHA-256 of a byte buffer, as 64 lowercase hex characters.
std::string sha256_hex(const void* data, std::size_t size);
std::string sha256_hex(const std::string& text);
std::string sha256_hex(const std::vector<std::uint8_t>& bytes);

/// SHA-256 of a file's contents, streamed.  Throws IoError when the file
/// cannot be read.
std::string sha256_file(const std::filesystem::path& path);

/// Derives a 64-bit seed from a canonical recipe string: the first eight
/// bytes of its SHA-256, interpreted big-endian.  Stable across platforms.
std::uint64_t seed_from_text(const std::string& canonical);

}  // namespace pforge

#endif  // PFORGE_DIGEST_HPP
