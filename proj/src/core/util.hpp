// Copyright 2026 The Loudnet Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LOUDNET_CORE_UTIL_HPP_
#define LOUDNET_CORE_UTIL_HPP_

#include <cstdint>
#include <cstring>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace loudnet {

// std::mt19937_64 has a fully specified output sequence; the standard
// distributions do not, so the mapping to doubles is done here.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1).
  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  double LogUniform(double lo, double hi);
  // Uniform integer in [0, n).
  uint64_t Below(uint64_t n);

 private:
  std::mt19937_64 engine_;
};

// Mixes a base seed with a stream index (SplitMix64 finalizer).
uint64_t DeriveSeed(uint64_t seed, uint64_t index);

uint64_t Fnv1a64(std::span<const uint8_t> bytes, uint64_t state = 0xcbf29ce484222325ULL);
uint64_t Fnv1a64(std::string_view text);
std::string HexU64(uint64_t value);

std::vector<uint8_t> ReadFileBytes(const std::string& path);
void WriteFileBytes(const std::string& path, std::span<const uint8_t> bytes);
std::string ReadFileText(const std::string& path);
void WriteFileText(const std::string& path, std::string_view text);

// Little-endian serialization. The supported targets are little-endian, so
// these are plain byte copies guarded by a static_assert in util.cpp.
class ByteWriter {
 public:
  template <typename T>
  void Put(T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    const auto* p = reinterpret_cast<const uint8_t*>(&value);
    bytes_.insert(bytes_.end(), p, p + sizeof(T));
  }
  template <typename T>
  void PutSpan(std::span<const T> values) {
    const auto* p = reinterpret_cast<const uint8_t*>(values.data());
    bytes_.insert(bytes_.end(), p, p + values.size_bytes());
  }
  void PutRaw(std::string_view s) { bytes_.insert(bytes_.end(), s.begin(), s.end()); }
  std::vector<uint8_t>& bytes() { return bytes_; }

 private:
  std::vector<uint8_t> bytes_;
};

class ByteReader {
 public:
  ByteReader(std::span<const uint8_t> bytes, std::string what)
      : bytes_(bytes), what_(std::move(what)) {}

  template <typename T>
  T Get() {
    T value;
    Copy(&value, sizeof(T));
    return value;
  }
  template <typename T>
  void GetSpan(std::span<T> out) {
    Copy(out.data(), out.size_bytes());
  }
  std::string GetRaw(size_t n);
  size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void Copy(void* dst, size_t n);
  std::span<const uint8_t> bytes_;
  size_t pos_ = 0;
  std::string what_;
};

// Runs body(chunk) for chunk in [0, n_chunks) on up to `workers` threads
// (0 = hardware concurrency). The first exception thrown is rethrown.
void ParallelChunks(size_t n_chunks, int workers, const std::function<void(size_t)>& body);

// Round-trippable, locale-independent fixed formatting used by every CSV and
// JSON report so reruns produce identical bytes.
std::string FormatFixed(double value, int decimals);

}  // namespace loudnet

#endif  // LOUDNET_CORE_UTIL_HPP_
