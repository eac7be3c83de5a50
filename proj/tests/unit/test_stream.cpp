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

#include <gtest/gtest.h>

#include <cmath>

#include "error.hpp"
#include "speechlike.hpp"
#include "stream.hpp"

namespace loudnet {
namespace {

const Oracle& Shared() {
  static const Oracle o = Oracle::Calibrate();
  return o;
}

struct Line {
  double t, phon;
};

// Batch reference: frame everything up front, then reduce and label.
std::vector<Line> BatchLabels(const std::vector<float>& x, int hop, int dft,
                              const FrameLabeler& label, double fs = 16000.0) {
  SpectrumAnalyzer analyzer(fs, dft, {});
  std::vector<Line> out;
  const auto frames = FrameAudio(x, fs, hop, dft);
  for (size_t i = 0; i < frames.size(); ++i) {
    out.push_back({static_cast<double>(i * hop) / fs, label(analyzer.Reduce(frames[i].samples))});
  }
  return out;
}

std::vector<Line> Streamed(const std::vector<float>& x, int hop, int dft, size_t block,
                           const FrameLabeler& label, double fs = 16000.0) {
  StreamProcessor sp(fs, hop, dft, {}, label);
  std::vector<Line> out;
  const auto sink = [&](double t, double p) { out.push_back({t, p}); };
  for (size_t pos = 0; pos < x.size(); pos += block) {
    sp.Push(std::span(x).subspan(pos, std::min(block, x.size() - pos)), sink);
  }
  sp.Finish(sink);
  EXPECT_EQ(sp.frames_emitted(), out.size());
  EXPECT_EQ(sp.samples_seen(), x.size());
  return out;
}

TEST(Stream, MatchesBatchPathForAnyBlocking) {
  const auto x = testing::SpeechLikeSignal(5, 1.3);
  const auto label = OracleLabeler(Shared());
  for (const auto [hop, dft] : {std::pair{560, 1024}, std::pair{16, 1024}, std::pair{2000, 512}}) {
    const auto ref = BatchLabels(x, hop, dft, label);
    ASSERT_EQ(ref.size(), FrameCount(x.size(), hop, dft));
    for (size_t block : {size_t{1}, size_t{7}, size_t{560}, size_t{4096}, x.size()}) {
      if (block == 1 && hop < 100) continue;  // same code path as 7, just slower
      const auto got = Streamed(x, hop, dft, block, label);
      ASSERT_EQ(got.size(), ref.size()) << hop << "/" << block;
      for (size_t i = 0; i < got.size(); ++i) {
        EXPECT_EQ(got[i].phon, ref[i].phon) << "frame " << i;
        EXPECT_DOUBLE_EQ(got[i].t, ref[i].t);
      }
    }
  }
}

TEST(Stream, OneSecondGivesFrameArithmetic) {
  const std::vector<float> x(16000, 0.0f);
  const auto lines = Streamed(x, 560, 1024, 1000, OracleLabeler(Shared()));
  EXPECT_EQ(lines.size(), 28u);
  for (const auto& l : lines) EXPECT_EQ(l.phon, 0.0);  // silence
  EXPECT_DOUBLE_EQ(lines[1].t, 0.035);
  EXPECT_EQ(Streamed(std::vector<float>(16000, 0.0f), 16, 1024, 512, OracleLabeler(Shared())).size(),
            FrameCount(16000, 16, 1024));
}

TEST(Stream, EmptyAndShortInput) {
  EXPECT_TRUE(Streamed({}, 560, 1024, 10, OracleLabeler(Shared())).empty());
  const std::vector<float> x(100, 0.1f);
  EXPECT_EQ(Streamed(x, 560, 1024, 10, OracleLabeler(Shared())).size(), 1u);
}

TEST(Stream, ModelLabelerClampsAtZero) {
  MlpModel m = InitModel(1);
  std::fill(m.params.begin(), m.params.end(), 0.0f);
  m.params.back() = -3.0f;
  const auto x = testing::SpeechLikeSignal(1, 0.2);
  for (const auto& l : Streamed(x, 560, 1024, 333, ModelLabeler(m))) EXPECT_EQ(l.phon, 0.0);
  MlpModel wrong = InitModel(1, {60, 4, 1});
  EXPECT_THROW(ModelLabeler(wrong), Error);
}

TEST(Stream, LifecycleAndValidation) {
  StreamProcessor sp(16000.0, 560, 1024, {}, OracleLabeler(Shared()));
  const auto sink = [](double, double) {};
  sp.Finish(sink);
  const std::vector<float> x(10);
  for (int i = 0; i < 2; ++i) {
    try {
      i == 0 ? sp.Push(x, sink) : sp.Finish(sink);
      ADD_FAILURE() << "use after finish accepted";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kState);
    }
  }
  EXPECT_THROW(StreamProcessor(16000.0, 0, 1024, {}, OracleLabeler(Shared())), Error);
  EXPECT_THROW(StreamProcessor(16000.0, 560, 1000, {}, OracleLabeler(Shared())), Error);
  EXPECT_THROW(StreamProcessor(8000.0, 80, 1024, {}, OracleLabeler(Shared())), Error);
  EXPECT_THROW(StreamProcessor(16000.0, 560, 1024, {}, FrameLabeler{}), Error);
}

TEST(Stream, LoudToneIsLabelledNearItsLevel) {
  // 968.75 Hz sits on a DFT bin at 16 kHz / 1024, so the band holds all power.
  std::vector<float> x(32000);
  const double amp = std::pow(10.0, (70.0 - 100.0) / 20.0);
  for (size_t i = 0; i < x.size(); ++i) {
    x[i] = static_cast<float>(amp * std::sin(2 * M_PI * 968.75 * i / 16000.0));
  }
  const auto lines = Streamed(x, 560, 1024, 1 << 14, OracleLabeler(Shared()));
  // Away from the padded tail every frame sees the steady tone.
  for (size_t i = 0; i + 2 < lines.size(); ++i) EXPECT_NEAR(lines[i].phon, 70.0, 1.5);
}

}  // namespace
}  // namespace loudnet
