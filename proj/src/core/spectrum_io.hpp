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

#ifndef LOUDNET_CORE_SPECTRUM_IO_HPP_
#define LOUDNET_CORE_SPECTRUM_IO_HPP_

#include <string>
#include <vector>

#include "frontend.hpp"

namespace loudnet {

// "SPF1" batch: magic, u32 frame count, then 61 float32 dB values per frame.
// A JSON sidecar at <path>.json records the band edges and calibration.
void WriteSpectrumFile(const std::string& path, const std::vector<SpectrumFrame>& frames,
                       const CalibrationSpec& cal, const BinningPlan& plan = CanonicalPlan());
std::vector<SpectrumFrame> ReadSpectrumFile(const std::string& path);
std::string SpectrumSidecarPath(const std::string& path);

// "LBL1" labels: magic, u32 count, then float32 phon per record.
void WriteLabelFile(const std::string& path, const std::vector<float>& phons);
std::vector<float> ReadLabelFile(const std::string& path);

}  // namespace loudnet

#endif  // LOUDNET_CORE_SPECTRUM_IO_HPP_
