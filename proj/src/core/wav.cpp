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

#include "wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "error.hpp"
#include "util.hpp"

namespace loudnet {

namespace {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;
constexpr uint16_t kFormatExtensible = 0xfffe;

void ReadExact(std::istream& in, void* dst, size_t n, const char* what) {
  in.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
  if (static_cast<size_t>(in.gcount()) != n) {
    Fail(ErrorCode::kFormat, std::string("wav: truncated ") + what);
  }
}

uint32_t U32(const uint8_t* p) {
  uint32_t v;
  std::memcpy(&v, p, 4);
  return v;
}

uint16_t U16(const uint8_t* p) {
  uint16_t v;
  std::memcpy(&v, p, 2);
  return v;
}

int BytesPerSample(SampleFormat f) {
  switch (f) {
    case SampleFormat::kPcm16: return 2;
    case SampleFormat::kPcm24: return 3;
    case SampleFormat::kFloat32: return 4;
  }
  return 0;
}

float DecodeSample(const uint8_t* p, SampleFormat f) {
  switch (f) {
    case SampleFormat::kPcm16: {
      int16_t v;
      std::memcpy(&v, p, 2);
      return static_cast<float>(v / 32768.0);
    }
    case SampleFormat::kPcm24: {
      int32_t v = static_cast<int32_t>(p[0] | (p[1] << 8) | (p[2] << 16));
      if (v & 0x800000) v -= 0x1000000;
      return static_cast<float>(v / 8388608.0);
    }
    case SampleFormat::kFloat32: {
      float v;
      std::memcpy(&v, p, 4);
      return v;
    }
  }
  return 0.0f;
}

}  // namespace

WavReader::WavReader(std::istream& in) : in_(&in) {
  uint8_t riff[12];
  ReadExact(*in_, riff, 12, "RIFF header");
  if (std::memcmp(riff, "RIFF", 4) != 0 || std::memcmp(riff + 8, "WAVE", 4) != 0) {
    Fail(ErrorCode::kFormat, "wav: missing RIFF/WAVE header");
  }
  bool have_fmt = false;
  for (;;) {
    uint8_t chunk[8];
    ReadExact(*in_, chunk, 8, "chunk header");
    const uint32_t size = U32(chunk + 4);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) Fail(ErrorCode::kFormat, "wav: fmt chunk too small");
      std::vector<uint8_t> fmt(size + (size & 1));
      ReadExact(*in_, fmt.data(), fmt.size(), "fmt chunk");
      uint16_t tag = U16(&fmt[0]);
      info_.channels = U16(&fmt[2]);
      info_.sample_rate = U32(&fmt[4]);
      const uint16_t bits = U16(&fmt[14]);
      if (tag == kFormatExtensible && size >= 26) tag = U16(&fmt[24]);
      if (tag == kFormatPcm && bits == 16) {
        info_.format = SampleFormat::kPcm16;
      } else if (tag == kFormatPcm && bits == 24) {
        info_.format = SampleFormat::kPcm24;
      } else if (tag == kFormatFloat && bits == 32) {
        info_.format = SampleFormat::kFloat32;
      } else {
        Fail(ErrorCode::kFormat, "wav: unsupported encoding (tag " + std::to_string(tag) +
                                     ", " + std::to_string(bits) + " bits)");
      }
      if (info_.channels < 1) Fail(ErrorCode::kFormat, "wav: zero channels");
      if (!(info_.sample_rate > 0)) Fail(ErrorCode::kFormat, "wav: zero sample rate");
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_fmt) Fail(ErrorCode::kFormat, "wav: data chunk before fmt chunk");
      const uint64_t frame_bytes =
          static_cast<uint64_t>(BytesPerSample(info_.format)) * info_.channels;
      // Streaming writers emit 0 or 0xffffffff when the length is unknown.
      bounded_ = size != 0 && size != 0xffffffffu;
      remaining_bytes_ = bounded_ ? size - size % frame_bytes : 0;
      info_.frames = bounded_ ? remaining_bytes_ / frame_bytes : 0;
      return;
    } else {
      std::vector<uint8_t> skip(size + (size & 1));
      ReadExact(*in_, skip.data(), skip.size(), "chunk");
    }
  }
}

std::unique_ptr<WavReader> WavReader::Open(const std::string& path) {
  auto file = std::make_unique<std::ifstream>(path, std::ios::binary);
  if (!*file) Fail(ErrorCode::kIo, "cannot open '" + path + "'");
  auto reader = std::make_unique<WavReader>(*file);
  reader->owned_ = std::move(file);
  return reader;
}

size_t WavReader::Read(std::span<float> out) {
  const size_t bps = BytesPerSample(info_.format);
  const size_t frame_bytes = bps * info_.channels;
  size_t want = out.size();
  if (bounded_) want = std::min<uint64_t>(want, remaining_bytes_ / frame_bytes);
  if (want == 0) return 0;
  scratch_.resize(want * frame_bytes);
  in_->read(reinterpret_cast<char*>(scratch_.data()),
            static_cast<std::streamsize>(scratch_.size()));
  const size_t got = static_cast<size_t>(in_->gcount()) / frame_bytes;
  if (bounded_) remaining_bytes_ -= got * frame_bytes;
  if (bounded_ && got < want) remaining_bytes_ = 0;
  for (size_t i = 0; i < got; ++i) {
    double acc = 0.0;
    for (int c = 0; c < info_.channels; ++c) {
      acc += DecodeSample(&scratch_[i * frame_bytes + c * bps], info_.format);
    }
    out[i] = static_cast<float>(acc / info_.channels);
  }
  return got;
}

WavData ReadWav(const std::string& path) {
  auto reader = WavReader::Open(path);
  WavData data;
  data.sample_rate = reader->info().sample_rate;
  std::vector<float> block(1 << 16);
  while (size_t n = reader->Read(block)) {
    data.samples.insert(data.samples.end(), block.begin(), block.begin() + n);
  }
  return data;
}

void WriteWav(const std::string& path, std::span<const float> samples, double sample_rate,
              SampleFormat format) {
  const int bps = BytesPerSample(format);
  const uint32_t data_bytes = static_cast<uint32_t>(samples.size() * bps);
  ByteWriter w;
  w.PutRaw("RIFF");
  w.Put<uint32_t>(36 + data_bytes);
  w.PutRaw("WAVE");
  w.PutRaw("fmt ");
  w.Put<uint32_t>(16);
  w.Put<uint16_t>(format == SampleFormat::kFloat32 ? kFormatFloat : kFormatPcm);
  w.Put<uint16_t>(1);
  w.Put<uint32_t>(static_cast<uint32_t>(sample_rate));
  w.Put<uint32_t>(static_cast<uint32_t>(sample_rate) * bps);
  w.Put<uint16_t>(static_cast<uint16_t>(bps));
  w.Put<uint16_t>(static_cast<uint16_t>(bps * 8));
  w.PutRaw("data");
  w.Put<uint32_t>(data_bytes);
  for (float x : samples) {
    switch (format) {
      case SampleFormat::kPcm16: {
        const double s = std::clamp(std::round(x * 32768.0), -32768.0, 32767.0);
        w.Put<int16_t>(static_cast<int16_t>(s));
        break;
      }
      case SampleFormat::kPcm24: {
        const auto s = static_cast<int32_t>(
            std::clamp(std::round(x * 8388608.0), -8388608.0, 8388607.0));
        w.Put<uint8_t>(s & 0xff);
        w.Put<uint8_t>((s >> 8) & 0xff);
        w.Put<uint8_t>((s >> 16) & 0xff);
        break;
      }
      case SampleFormat::kFloat32:
        w.Put<float>(x);
        break;
    }
  }
  WriteFileBytes(path, w.bytes());
}

size_t RawPcmReader::Read(std::span<float> out) {
  const size_t bps = BytesPerSample(format_);
  scratch_.resize(out.size() * bps);
  in_.read(reinterpret_cast<char*>(scratch_.data()), static_cast<std::streamsize>(scratch_.size()));
  const size_t got = static_cast<size_t>(in_.gcount()) / bps;
  for (size_t i = 0; i < got; ++i) out[i] = DecodeSample(&scratch_[i * bps], format_);
  return got;
}

}  // namespace loudnet
