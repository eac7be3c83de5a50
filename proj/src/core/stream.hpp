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

#ifndef LOUDNET_CORE_STREAM_HPP_
#define LOUDNET_CORE_STREAM_HPP_

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "frontend.hpp"
#include "mlp.hpp"
#include "oracle.hpp"

namespace loudnet {

// Maps one spectrum to phon (already clamped at 0).
using FrameLabeler = std::function<double(const SpectrumFrame&)>;
FrameLabeler ModelLabeler(const MlpModel& model);
FrameLabeler OracleLabeler(const Oracle& oracle);

// (frame start time in seconds, phon)
using FrameSink = std::function<void(double, double)>;

// Push-driven read -> reduce -> label pipeline. Emits exactly the frames
// FrameAudio would produce for the concatenated input; the buffer never holds
// more than one frame plus the last pushed block.
class StreamProcessor {
 public:
  StreamProcessor(double sample_rate, int hop, int dft_size, CalibrationSpec cal,
                  FrameLabeler labeler);

  void Push(std::span<const float> samples, const FrameSink& sink);
  // Flushes the zero-padded tail frames. Further pushes are rejected.
  void Finish(const FrameSink& sink);

  size_t frames_emitted() const { return next_frame_; }
  size_t samples_seen() const { return total_; }

 private:
  void Emit(size_t frame, const FrameSink& sink);

  SpectrumAnalyzer analyzer_;
  int hop_;
  int dft_size_;
  FrameLabeler labeler_;
  std::vector<float> buf_;
  size_t buf_start_ = 0;  // absolute index of buf_[0]
  size_t total_ = 0;
  size_t next_frame_ = 0;
  bool finished_ = false;
};

}  // namespace loudnet

#endif  // LOUDNET_CORE_STREAM_HPP_
