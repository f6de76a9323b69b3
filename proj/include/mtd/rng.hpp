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

#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <string>

#include "mtd/core.hpp"

namespace mtd {

/// 256-bit key for the secret configuration schedule.
class ScheduleKey {
 public:
  ScheduleKey() { bytes_.fill(0); }
  explicit ScheduleKey(const std::array<std::uint8_t, 32>& bytes) : bytes_(bytes) {}

  /// 64 hex characters.
  static ScheduleKey from_hex(const std::string& hex);
  /// SHA-256 of a fixed domain tag and the little-endian integer.
  static ScheduleKey from_integer(std::uint64_t seed);

  /// Independent key for trial `index` (SHA-256 of key and index).
  ScheduleKey derive(std::uint64_t index) const;

  std::string to_hex() const;
  const std::array<std::uint8_t, 32>& bytes() const { return bytes_; }

  friend bool operator==(const ScheduleKey&, const ScheduleKey&) = default;

 private:
  std::array<std::uint8_t, 32> bytes_;
};

/// Uniform draw in [0, bound) from the ChaCha20 keystream block `counter`.
/// Pure function of (key, counter, bound); identical on every platform.
std::uint32_t keyed_uniform(const ScheduleKey& key, std::uint64_t counter,
                            std::uint32_t bound);

/// Seeded pseudo-random stream for noise and Monte Carlo draws.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed = 0) : engine_(seed) {}

  /// Stream keyed by a base seed plus a list of tags (trial, purpose, ...).
  static RandomStream derive(std::uint64_t seed, std::initializer_list<std::uint64_t> tags);

  double normal() { return normal_(engine_); }
  Vector normal_vector(Index n);
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  std::uint32_t uniform_index(std::uint32_t bound) {
    return std::uniform_int_distribution<std::uint32_t>(0, bound - 1)(engine_);
  }
  std::uint64_t next_u64() { return engine_(); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Stream purposes used with RandomStream::derive.
namespace stream_tag {
inline constexpr std::uint64_t kProcessNoise = 0x70726f63;
inline constexpr std::uint64_t kFusionNoise = 0x66757365;
inline constexpr std::uint64_t kAttackGuess = 0x67756573;
inline constexpr std::uint64_t kSystem = 0x73797374;
}  // namespace stream_tag

}  // namespace mtd
