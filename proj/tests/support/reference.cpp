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

#include "reference.hpp"

#include <cmath>
#include <numbers>

namespace loudnet::testing {

double RefForward(const std::vector<int>& dims, const std::vector<double>& params, double shift,
                  double scale, const float* x) {
  std::vector<double> a(dims[0]);
  for (int i = 0; i < dims[0]; ++i) a[i] = (x[i] + shift) * scale;
  size_t off = 0;
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    const int in = dims[l], out = dims[l + 1];
    std::vector<double> z(out);
    for (int o = 0; o < out; ++o) {
      double s = 0.0;
      for (int i = 0; i < in; ++i) s += params[off + static_cast<size_t>(o) * in + i] * a[i];
      z[o] = s;
    }
    off += static_cast<size_t>(in) * out;
    for (int o = 0; o < out; ++o) {
      z[o] += params[off + o];
      if (l + 2 < dims.size() && z[o] < 0.0) z[o] = 0.0;
    }
    off += out;
    a = z;
  }
  return a[0];
}

double RefAdam::Step(double param, double grad) {
  ++t;
  m = b1 * m + (1 - b1) * grad;
  v = b2 * v + (1 - b2) * grad * grad;
  const double mh = m / (1 - std::pow(b1, t));
  const double vh = v / (1 - std::pow(b2, t));
  return param - lr * mh / (std::sqrt(vh) + eps);
}

std::vector<double> RefBandEdges() {
  std::vector<double> e;
  for (int i = 0; i <= 13; ++i) e.push_back(200.0 * i / 13.0);
  for (int k = 1; k <= 48; ++k) e.push_back(200.0 * std::pow(2.0, k / 9.0));
  return e;
}

std::vector<double> NaiveBinPowers(const std::vector<float>& frame, int n) {
  std::vector<double> w(n);
  double wsum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
    wsum2 += w[i] * w[i];
  }
  std::vector<double> p(n / 2 + 1);
  for (int k = 0; k <= n / 2; ++k) {
    double re = 0.0, im = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = i < static_cast<int>(frame.size()) ? frame[i] * w[i] : 0.0;
      const double ph = 2.0 * std::numbers::pi * k * i / n;
      re += x * std::cos(ph);
      im -= x * std::sin(ph);
    }
    const double c = (k == 0 || k == n / 2) ? 1.0 : 2.0;
    p[k] = c * (re * re + im * im) / (n * wsum2);
  }
  return p;
}

double RefCam(double hz) { return 21.4 * std::log10(4.37 * hz / 1000.0 + 1.0); }

}  // namespace loudnet::testing
