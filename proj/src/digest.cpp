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

#include "pforge/digest.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>

#include "pforge/errors.hpp"

namespace pforge {

namespace {

using EvpCtx = std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)>;

EvpCtx make_sha256_ctx() {
  EvpCtx ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw IoError("could not initialize SHA-256");
  }
  return ctx;
}

std::string finish_hex(EvpCtx ctx) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> raw{};
  unsigned int raw_len = 0;
  if (EVP_DigestFinal_ex(ctx.get(), raw.data(), &raw_len) != 1) {
    throw IoError("could not finalize SHA-256");
  }
  static const char* kHex = "0123456789abcdef";
  std::string hex;
  hex.reserve(2 * raw_len);
  for (unsigned int i = 0; i < raw_len; ++i) {
    hex.push_back(kHex[raw[i] >> 4]);
    hex.push_back(kHex[raw[i] & 0x0f]);
  }
  return hex;
}

}  // namespace

std::string sha256_hex(const void* data, std::size_t size) {
  EvpCtx ctx = make_sha256_ctx();
  if (size > 0 && EVP_DigestUpdate(ctx.get(), data, size) != 1) {
    throw IoError("could not hash buffer");
  }
  return finish_hex(std::move(ctx));
}

std::string sha256_hex(const std::string& text) {
  return sha256_hex(text.data(), text.size());
}

std::string sha256_hex(const std::vector<std::uint8_t>& bytes) {
  return sha256_hex(bytes.data(), bytes.size());
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot read " + path.string());
  }
  EvpCtx ctx = make_sha256_ctx();
  std::array<char, 1 << 16> buffer;
  while (in) {
    in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    const std::streamsize got = in.gcount();
    if (got > 0 &&
        EVP_DigestUpdate(ctx.get(), buffer.data(),
                         static_cast<std::size_t>(got)) != 1) {
      throw IoError("could not hash " + path.string());
    }
  }
  if (in.bad()) {
    throw IoError("read failure on " + path.string());
  }
  return finish_hex(std::move(ctx));
}

std::uint64_t seed_from_text(const std::string& canonical) {
  EvpCtx ctx = make_sha256_ctx();
  if (!canonical.empty() &&
      EVP_DigestUpdate(ctx.get(), canonical.data(), canonical.size()) != 1) {
    throw IoError("could not hash recipe text");
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> raw{};
  unsigned int raw_len = 0;
  if (EVP_DigestFinal_ex(ctx.get(), raw.data(), &raw_len) != 1 ||
      raw_len < 8) {
    throw IoError("could not finalize recipe hash");
  }
  std::uint64_t seed = 0;
  for (int i = 0; i < 8; ++i) {
    seed = (seed << 8) | raw[static_cast<std::size_t>(i)];
  }
  return seed;
}

}  // namespace pforge
