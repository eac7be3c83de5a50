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

#ifndef LOUDNET_CORE_WAV_HPP_
#define LOUDNET_CORE_WAV_HPP_

#include <cstdint>
#include <istream>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace loudnet {

enum class SampleFormat { kPcm16, kPcm24, kFloat32 };

struct WavInfo {
  double sample_rate = 0.0;
  int channels = 0;
  SampleFormat format = SampleFormat::kPcm16;
  uint64_t frames = 0;  // 0 when the data chunk size is unknown (streamed)
};

// Incremental RIFF/WAVE reader; multichannel input is averaged to mono.
// Works on pipes: only forward reads are issued.
class WavReader {
 public:
  explicit WavReader(std::istream& in);
  static std::unique_ptr<WavReader> Open(const std::string& path);

  const WavInfo& info() const { return info_; }
  // Reads up to out.size() mono samples; returns the count, 0 at end of data.
  size_t Read(std::span<float> out);

 private:
  std::unique_ptr<std::istream> owned_;
  std::istream* in_;
  WavInfo info_;
  uint64_t remaining_bytes_ = 0;
  bool bounded_ = true;
  std::vector<uint8_t> scratch_;
};

struct WavData {
  std::vector<float> samples;  // mono
  double sample_rate = 0.0;
};

WavData ReadWav(const std::string& path);
void WriteWav(const std::string& path, std::span<const float> samples, double sample_rate,
              SampleFormat format = SampleFormat::kPcm16);

// Headerless little-endian PCM from a stream (s16 or f32), mono.
class RawPcmReader {
 public:
  RawPcmReader(std::istream& in, SampleFormat format) : in_(in), format_(format) {}
  size_t Read(std::span<float> out);

 private:
  std::istream& in_;
  SampleFormat format_;
  std::vector<uint8_t> scratch_;
};

}  // namespace loudnet

#endif  // LOUDNET_CORE_WAV_HPP_
