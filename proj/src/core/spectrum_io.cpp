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

#include "spectrum_io.hpp"

#include <nlohmann/json.hpp>

#include "error.hpp"
#include "util.hpp"

namespace loudnet {

std::string SpectrumSidecarPath(const std::string& path) { return path + ".json"; }

void WriteSpectrumFile(const std::string& path, const std::vector<SpectrumFrame>& frames,
                       const CalibrationSpec& cal, const BinningPlan& plan) {
  ByteWriter w;
  w.PutRaw("SPF1");
  w.Put<uint32_t>(static_cast<uint32_t>(frames.size()));
  for (const auto& f : frames) w.PutSpan<float>(f.levels);
  WriteFileBytes(path, w.bytes());

  nlohmann::ordered_json side;
  side["format"] = "SPF1";
  side["bands"] = kNumBands;
  side["frames"] = frames.size();
  side["band_edges_hz"] = plan.edges;
  side["calibration"] = {{"full_scale_spl", cal.full_scale_spl}, {"floor_spl", cal.floor_spl}};
  WriteFileText(SpectrumSidecarPath(path), side.dump(2) + "\n");
}

std::vector<SpectrumFrame> ReadSpectrumFile(const std::string& path) {
  const auto bytes = ReadFileBytes(path);
  ByteReader r(bytes, path);
  if (r.GetRaw(4) != "SPF1") Fail(ErrorCode::kFormat, path + ": bad magic, expected SPF1");
  const uint32_t count = r.Get<uint32_t>();
  if (r.remaining() != static_cast<size_t>(count) * kNumBands * sizeof(float)) {
    Fail(ErrorCode::kFormat, path + ": size does not match frame count");
  }
  std::vector<SpectrumFrame> frames(count);
  for (auto& f : frames) r.GetSpan<float>(f.levels);
  return frames;
}

void WriteLabelFile(const std::string& path, const std::vector<float>& phons) {
  ByteWriter w;
  w.PutRaw("LBL1");
  w.Put<uint32_t>(static_cast<uint32_t>(phons.size()));
  w.PutSpan<float>(phons);
  WriteFileBytes(path, w.bytes());
}

std::vector<float> ReadLabelFile(const std::string& path) {
  const auto bytes = ReadFileBytes(path);
  ByteReader r(bytes, path);
  if (r.GetRaw(4) != "LBL1") Fail(ErrorCode::kFormat, path + ": bad magic, expected LBL1");
  const uint32_t count = r.Get<uint32_t>();
  if (r.remaining() != static_cast<size_t>(count) * sizeof(float)) {
    Fail(ErrorCode::kFormat, path + ": size does not match label count");
  }
  std::vector<float> out(count);
  r.GetSpan<float>(out);
  return out;
}

}  // namespace loudnet
