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

#include "cwic/autoenc.hpp"
#include "cwic/error.hpp"
#include "doctest.h"
#include "oracles.hpp"

namespace cwic {
namespace {

using testing::RandomCuboid;

NetworkConfig Tiny() {
  NetworkConfig c;
  c.stage_channels = {4, 6, 8};
  c.dense_convs = {2};
  c.code_channels = 8;
  return c;
}

TEST_SUITE("autoenc") {
  TEST_CASE("encoder shapes and range") {
    std::mt19937_64 rng(31);
    const CwicNetworks nets = CwicNetworks::Random(Tiny(), rng);
    const ImagePlane x = RandomCuboid(rng, 3, 32, 32, 0.0, 1.0);
    const EncoderOutput a = EncoderForward(nets, x);
    REQUIRE(a.features.channels() == 8);
    REQUIRE(a.features.height() == 4);
    REQUIRE(a.features.width() == 4);
    for (double v : a.features.values()) {
      CHECK(v > 0.0);
      CHECK(v < 1.0);
    }
    const EncoderOutput b = EncoderForward(nets, x);
    CHECK(a.features == b.features);
    CHECK(a.shared == b.shared);
  }

  TEST_CASE("importance map is one channel in (0, 1) and deterministic") {
    std::mt19937_64 rng(32);
    const CwicNetworks nets = CwicNetworks::Random(Tiny(), rng);
    const ImagePlane x = RandomCuboid(rng, 3, 16, 24, 0.0, 1.0);
    const EncoderOutput e = EncoderForward(nets, x);
    const FeatureCuboid p = ImportanceForward(nets, e.shared);
    REQUIRE(p.channels() == 1);
    CHECK(p.height() == 2);
    CHECK(p.width() == 3);
    for (double v : p.values()) CHECK((v > 0.0 && v < 1.0));
    CHECK(ImportanceForward(nets, e.shared) == p);
  }

  TEST_CASE("decoder shape and zero-input behaviour") {
    std::mt19937_64 rng(33);
    CwicNetworks nets = CwicNetworks::Random(Tiny(), rng);
    const ImagePlane y = DecoderForward(nets, FeatureCuboid(8, 4, 4));
    CHECK(y.channels() == 3);
    CHECK(y.height() == 32);
    CHECK(y.width() == 32);
    for (ParamRef& ref : nets.Params()) {
      if (ref.name.ends_with(".bias")) std::fill(ref.values->begin(), ref.values->end(), 0.0);
    }
    const ImagePlane zero_out = DecoderForward(nets, FeatureCuboid(8, 4, 4));
    for (double v : zero_out.values()) {
      CHECK(v == 0.0);
    }
  }

  TEST_CASE("image dims must be multiples of 8") {
    CHECK_NOTHROW(CheckImageDims(8, 16));
    CHECK_THROWS_AS(CheckImageDims(12, 16), Error);
    std::mt19937_64 rng(34);
    const CwicNetworks nets = CwicNetworks::Random(Tiny(), rng);
    CHECK_THROWS_AS(EncoderForward(nets, ImagePlane(3, 20, 16)), Error);
  }

  TEST_CASE("parameter names are prefixed by sub-network") {
    CwicNetworks nets = CwicNetworks::Build(Tiny());
    int prefixes[4] = {0, 0, 0, 0};
    const char* names[4] = {"encoder.shared.", "encoder.specific.",
                            "importance.", "decoder."};
    for (const ParamRef& ref : nets.Params()) {
      int hits = 0;
      for (int n = 0; n < 4; ++n) {
        if (ref.name.rfind(names[n], 0) == 0) {
          ++prefixes[n];
          ++hits;
        }
      }
      CHECK(hits == 1);
    }
    for (int n : prefixes) CHECK(n > 0);
  }

  TEST_CASE("mse") {
    std::mt19937_64 rng(35);
    const ImagePlane x = RandomCuboid(rng, 3, 4, 4, 0.0, 0.8);
    CHECK(MseLoss(x, x) == 0.0);
    ImagePlane y = x;
    for (size_t n = 0; n < y.size(); ++n) y[n] += 0.1;
    CHECK(MseLoss(y, x) == doctest::Approx(0.01));
  }

  TEST_CASE("ms-ssim self-similarity") {
    std::mt19937_64 rng(36);
    const ImagePlane x = RandomCuboid(rng, 3, 48, 48, 0.0, 1.0);
    CHECK(MsSsim(x, x) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(MsSsimLoss(x, x)) <= 1e-10);
    ImagePlane y = x;
    for (size_t n = 0; n < y.size(); ++n) y[n] = std::clamp(y[n] + 0.2 * std::sin(n * 0.7), 0.0, 1.0);
    CHECK(MsSsimLoss(y, x) > 0.0);
  }

  TEST_CASE("single-scale ms-ssim of equal constant images is one") {
    const ImagePlane a(3, 16, 16, 0.3);
    MsSsimOptions one;
    one.scales = 1;
    CHECK(MsSsimLoss(a, a, one) == doctest::Approx(0.0));
  }

  TEST_CASE("ms-ssim rejects images below the minimum size") {
    CHECK(MsSsimMinSize(3) == 44);
    const ImagePlane a(3, 40, 40, 0.3);
    CHECK_THROWS_AS(MsSsim(a, a), Error);
  }

  TEST_CASE("ms-ssim weights sum to one") {
    for (int s = 1; s <= 5; ++s) {
      double sum = 0.0;
      for (double w : MsSsimWeights(s)) sum += w;
      CHECK(sum == doctest::Approx(1.0));
    }
  }

  TEST_CASE("psnr is capped for identical images") {
    const ImagePlane a(3, 8, 8, 0.5);
    CHECK(Psnr(a, a) == kPsnrCap);
    ImagePlane b = a;
    for (size_t n = 0; n < b.size(); ++n) b[n] += 0.1;
    CHECK(Psnr(b, a) == doctest::Approx(20.0));
  }

  TEST_CASE("full-scale configuration") {
    const NetworkConfig c = NetworkConfig::FullScale(32);
    CHECK(c.stage_channels == std::vector<int>{64, 128, 256});
    CHECK(c.dense_convs == std::vector<int>{3, 2, 2});
    CHECK_NOTHROW(c.Validate());
  }
}

}  // namespace
}  // namespace cwic
