// Copyright 2026 The mtd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mtd/rng.hpp"

#include <cstring>
#include <vector>

#include <sodium.h>

namespace mtd {
namespace {

void ensure_sodium() {
  static const bool ready = [] { return sodium_init() >= 0; }();
  if (!ready) fail(ErrorKind::Model, "libsodium initialisation failed");
}

void put_le64(std::uint8_t* out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

std::uint64_t get_le64(const std::uint8_t* in) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | in[i];
  return v;
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

ScheduleKey ScheduleKey::from_hex(const std::string& hex) {
  require(hex.size() == 64, ErrorKind::Config, "schedule key must be 64 hex characters");
  std::array<std::uint8_t, 32> bytes{};
  for (std::size_t i = 0; i < 32; ++i) {
    const int hi = hex_value(hex[2 * i]);
    const int lo = hex_value(hex[2 * i + 1]);
    require(hi >= 0 && lo >= 0, ErrorKind::Config, "schedule key contains non-hex characters");
    bytes[i] = static_cast<std::uint8_t>(hi * 16 + lo);
  }
  return ScheduleKey(bytes);
}

ScheduleKey ScheduleKey::from_integer(std::uint64_t seed) {
  ensure_sodium();
  static constexpr char kTag[] = "mtd-schedule-key";
  std::uint8_t msg[sizeof(kTag) - 1 + 8];
  std::memcpy(msg, kTag, sizeof(kTag) - 1);
  put_le64(msg + sizeof(kTag) - 1, seed);
  std::array<std::uint8_t, 32> out{};
  crypto_hash_sha256(out.data(), msg, sizeof(msg));
  return ScheduleKey(out);
}

ScheduleKey ScheduleKey::derive(std::uint64_t index) const {
  ensure_sodium();
  std::uint8_t msg[32 + 8];
  std::memcpy(msg, bytes_.data(), 32);
  put_le64(msg + 32, index);
  std::array<std::uint8_t, 32> out{};
  crypto_hash_sha256(out.data(), msg, sizeof(msg));
  return ScheduleKey(out);
}

std::string ScheduleKey::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s(64, '0');
  for (std::size_t i = 0; i < 32; ++i) {
    s[2 * i] = kDigits[bytes_[i] >> 4];
    s[2 * i + 1] = kDigits[bytes_[i] & 0xf];
  }
  return s;
}

std::uint32_t keyed_uniform(const ScheduleKey& key, std::uint64_t counter,
                            std::uint32_t bound) {
  require(bound >= 1, ErrorKind::InvalidArgument, "keyed_uniform: bound must be positive");
  if (bound == 1) return 0;
  ensure_sodium();
  // One 64-byte keystream block per counter value, nonce 0 for schedules.
  std::uint8_t nonce[crypto_stream_chacha20_NONCEBYTES] = {0};
  std::uint8_t block[64] = {0};
  crypto_stream_chacha20_xor_ic(block, block, sizeof(block), nonce, counter,
                                key.bytes().data());
  // Rejection sampling over the eight 64-bit words of the block.
  // Words below 2^64 mod bound are rejected so the remainder is unbiased.
  const std::uint64_t reject_below = (0 - static_cast<std::uint64_t>(bound)) % bound;
  for (int w = 0; w < 8; ++w) {
    const std::uint64_t word = get_le64(block + 8 * w);
    if (word >= reject_below) return static_cast<std::uint32_t>(word % bound);
  }
  // Eight rejections in a row has probability below 2^-256.
  fail(ErrorKind::Model, "keyed_uniform: keystream block exhausted");
}

RandomStream RandomStream::derive(std::uint64_t seed,
                                  std::initializer_list<std::uint64_t> tags) {
  std::vector<std::uint32_t> words;
  words.push_back(static_cast<std::uint32_t>(seed));
  words.push_back(static_cast<std::uint32_t>(seed >> 32));
  for (std::uint64_t t : tags) {
    words.push_back(static_cast<std::uint32_t>(t));
    words.push_back(static_cast<std::uint32_t>(t >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  RandomStream s;
  s.engine_.seed(seq);
  return s;
}

Vector RandomStream::normal_vector(Index n) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = normal();
  return v;
}

}  // namespace mtd
