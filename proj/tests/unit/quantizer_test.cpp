// Copyright 2026 The CWIC Authors
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

#include <cmath>
#include <random>
#include <vector>

#include "cwic/error.hpp"
#include "cwic/quantizer.hpp"
#include "doctest.h"
#include "oracles.hpp"

namespace cwic {
namespace {

using testing::RandomCuboid;

FeatureCuboid Filled(int c, int h, int w, double v) {
  return FeatureCuboid(c, h, w, v);
}

TEST_SUITE("quantizer") {
  TEST_CASE("uniform init, T = 8") {
    const QuantizerParams q = QuantizerParams::Uniform(2, 8);
    for (int k = 0; k < 2; ++k) {
      CHECK(q.weight(k, 0) == 0.0625);
      for (int t = 1; t < 8; ++t) CHECK(q.weight(k, t) == 0.125);
    }
    const std::vector<double> c = q.Centers();
    for (int t = 0; t < 8; ++t) CHECK(c[t] == doctest::Approx(0.0625 + 0.125 * t));
    CHECK(c[7] == 0.9375);
  }

  TEST_CASE("uniform init, T = 2") {
    const std::vector<double> c = QuantizerParams::Uniform(1, 2).Centers();
    CHECK(c == std::vector<double>{0.25, 0.75});
  }

  TEST_CASE("last center is 1 - 1/(2T)") {
    for (int t = 2; t <= 64; ++t) {
      const std::vector<double> c = QuantizerParams::Uniform(3, t).Centers();
      for (int k = 0; k < 3; ++k) {
        CHECK(c[k * t + t - 1] == doctest::Approx(1.0 - 0.5 / t).epsilon(1e-14));
      }
    }
  }

  TEST_CASE("centers are prefix sums") {
    QuantizerParams q(1, 3);
    q.weights() = {0.1, 0.2, 0.3};
    const std::vector<double> c = q.Centers();
    CHECK(c[0] == doctest::Approx(0.1));
    CHECK(c[1] == doctest::Approx(0.3));
    CHECK(c[2] == doctest::Approx(0.6));
    q.weights() = {0.0, 0.0, 0.0};
    CHECK(q.Centers() == std::vector<double>{0.0, 0.0, 0.0});
  }

  TEST_CASE("nearest center with ties to the lower level") {
    const QuantizerParams q = QuantizerParams::Uniform(1, 8);
    Quantized r = Quantize(Filled(1, 1, 1, 0.0), q);
    CHECK(r.levels[0] == 0);
    CHECK(r.values[0] == 0.0625);
    r = Quantize(Filled(1, 1, 1, 0.5), q);
    CHECK(r.levels[0] == 3);
    CHECK(r.values[0] == 0.4375);
  }

  TEST_CASE("quantize agrees with exhaustive search") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> d(0.0, 0.4);
    for (int trial = 0; trial < 20; ++trial) {
      QuantizerParams q(3, 5);
      for (double& w : q.weights()) w = d(rng);
      const FeatureCuboid e = RandomCuboid(rng, 3, 4, 4, 0.0, 1.0);
      const Quantized r = Quantize(e, q);
      const std::vector<double> c = q.Centers();
      for (int k = 0; k < 3; ++k) {
        for (int i = 0; i < 4; ++i) {
          for (int j = 0; j < 4; ++j) {
            int best = 0;
            for (int t = 1; t < 5; ++t) {
              if (std::abs(e.at(k, i, j) - c[k * 5 + t]) <
                  std::abs(e.at(k, i, j) - c[k * 5 + best])) {
                best = t;
              }
            }
            CHECK(r.levels.at(k, i, j) == best);
          }
        }
      }
    }
  }

  TEST_CASE("dequantize") {
    const QuantizerParams q = QuantizerParams::Uniform(2, 8);
    const CodeCuboid zeros(2, 2, 2, 0);
    const FeatureCuboid none = Dequantize(zeros, BinaryCuboid(2, 2, 2, 0), q);
    for (double v : none.values()) CHECK(v == 0.0);
    const FeatureCuboid all = Dequantize(zeros, BinaryCuboid(2, 2, 2, 1), q);
    for (double v : all.values()) CHECK(v == 0.0625);

    std::mt19937_64 rng(12);
    const FeatureCuboid e = RandomCuboid(rng, 2, 3, 3, 0.0, 1.0);
    const Quantized r = Quantize(e, q);
    CHECK(Dequantize(r.levels, BinaryCuboid(2, 3, 3, 1), q) == r.values);
  }

  TEST_CASE("quantization loss") {
    const QuantizerParams q = QuantizerParams::Uniform(1, 8);
    const std::vector<double> c = q.Centers();
    FeatureCuboid at_centers(1, 1, 8);
    for (int t = 0; t < 8; ++t) at_centers[t] = c[t];
    CHECK(QuantizationLoss(at_centers, q) == 0.0);
    CHECK(QuantizationLoss(Filled(1, 2, 2, 0.5), q) == doctest::Approx(0.00390625));
  }

  TEST_CASE("straight-through gradient is the identity") {
    std::mt19937_64 rng(13);
    const FeatureCuboid g = RandomCuboid(rng, 3, 2, 2);
    CHECK(StraightThroughGrad(g) == g);
    CHECK(StraightThroughGrad(FeatureCuboid(1, 2, 2)) == FeatureCuboid(1, 2, 2));
  }

  TEST_CASE("negative weights are projected to zero") {
    QuantizerParams q(1, 3);
    q.weights() = {0.2, -0.1, 0.3};
    q.ProjectNonNegative();
    CHECK(q.weights() == std::vector<double>{0.2, 0.0, 0.3});
  }

  TEST_CASE("no re-init while every level is used") {
    QuantizerParams q = QuantizerParams::Uniform(2, 4);
    const QuantizerParams before = q;
    LevelHistogramWindow w(2, 4);
    for (int b = 0; b < LevelHistogramWindow::kWindow; ++b) {
      w.Push(std::vector<int64_t>(8, 1));
    }
    CHECK(MonitorAndReinit(q, w).empty());
    CHECK(q.weights() == before.weights());
  }

  TEST_CASE("dead tail levels are re-spread below the last live center") {
    QuantizerParams q(1, 4);
    q.weights() = {0.125, 0.25, 0.25, 0.25};
    const std::vector<double> old_centers = q.Centers();
    LevelHistogramWindow w(1, 4);
    for (int b = 0; b < LevelHistogramWindow::kWindow - 1; ++b) {
      w.Push({5, 3, 0, 0});
    }
    // Not yet a full window.
    CHECK(MonitorAndReinit(q, w).empty());
    w.Push({5, 3, 0, 0});
    const std::vector<int> reset = MonitorAndReinit(q, w);
    REQUIRE(reset == std::vector<int>{0});
    CHECK(q.weight(0, 0) == 0.125);
    for (int t = 1; t < 4; ++t) CHECK(q.weight(0, t) == doctest::Approx(0.25 / 3));
    // New top center sits where the last used one was.
    CHECK(q.Centers()[3] == doctest::Approx(old_centers[1]).epsilon(1e-15));
    CHECK(w.filled(0) == 0);
  }

  TEST_CASE("histogram window keeps the most recent batches") {
    LevelHistogramWindow w(1, 2);
    for (int b = 0; b < LevelHistogramWindow::kWindow + 10; ++b) w.Push({1, 2});
    CHECK(w.filled(0) == LevelHistogramWindow::kWindow);
    CHECK(w.total(0, 1) == 2 * LevelHistogramWindow::kWindow);
  }

  TEST_CASE("invalid parameters are rejected") {
    QuantizerParams q(1, 2);
    q.weights() = {0.1, -0.2};
    CHECK_THROWS_AS(q.Validate(), Error);
  }
}

}  // namespace
}  // namespace cwic
