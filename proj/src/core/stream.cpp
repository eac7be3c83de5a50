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

#include "stream.hpp"

#include <algorithm>

#include "error.hpp"

namespace loudnet {

FrameLabeler ModelLabeler(const MlpModel& model) {
  model.Validate();
  Require(model.topology.input_dim() == kNumBands && model.topology.output_dim() == 1,
          "model does not map 61 bands to one value");
  return [&model](const SpectrumFrame& f) {
    return std::max(0.0, static_cast<double>(PredictOne(model, f.levels)));
  };
}

FrameLabeler OracleLabeler(const Oracle& oracle) {
  return [&oracle](const SpectrumFrame& f) { return oracle.Loudness(f).phon; };
}

StreamProcessor::StreamProcessor(double sample_rate, int hop, int dft_size, CalibrationSpec cal,
                                 FrameLabeler labeler)
    : analyzer_(sample_rate, dft_size, cal), hop_(hop), dft_size_(dft_size),
      labeler_(std::move(labeler)) {
  Require(hop > 0, "hop must be positive");
  Require(static_cast<bool>(labeler_), "stream needs a labeler");
  buf_.reserve(static_cast<size_t>(dft_size) * 2);
}

void StreamProcessor::Emit(size_t frame, const FrameSink& sink) {
  const size_t start = frame * static_cast<size_t>(hop_);
  const size_t offset = start - buf_start_;
  const size_t n = std::min(buf_.size() - std::min(buf_.size(), offset),
                            static_cast<size_t>(dft_size_));
  const auto spectrum =
      analyzer_.Reduce(std::span<const float>(buf_).subspan(std::min(offset, buf_.size()), n));
  sink(static_cast<double>(start) / analyzer_.sample_rate(), labeler_(spectrum));
}

void StreamProcessor::Push(std::span<const float> samples, const FrameSink& sink) {
  if (finished_) Fail(ErrorCode::kState, "stream already finished");
  const size_t dft = static_cast<size_t>(dft_size_);
  const size_t hop = static_cast<size_t>(hop_);
  size_t pos = 0;
  // Feed in slices so the buffer stays bounded however large the push is.
  while (pos < samples.size()) {
    const size_t take = std::min(samples.size() - pos, dft);
    buf_.insert(buf_.end(), samples.begin() + pos, samples.begin() + pos + take);
    total_ += take;
    pos += take;
    while (next_frame_ * hop + dft <= total_) Emit(next_frame_++, sink);
    const size_t keep_from = next_frame_ * hop;
    if (keep_from > buf_start_) {
      const size_t drop = std::min(keep_from - buf_start_, buf_.size());
      buf_.erase(buf_.begin(), buf_.begin() + drop);
      buf_start_ += drop;
    }
  }
}

void StreamProcessor::Finish(const FrameSink& sink) {
  if (finished_) Fail(ErrorCode::kState, "stream already finished");
  finished_ = true;
  const size_t count = FrameCount(total_, hop_, dft_size_);
  while (next_frame_ < count) Emit(next_frame_++, sink);
}

}  // namespace loudnet
