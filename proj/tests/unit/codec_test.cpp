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

#include <random>
#include <vector>

#include "cwic/autoenc.hpp"
#include "cwic/codec.hpp"
#include "cwic/container.hpp"
#include "cwic/error.hpp"
#include "cwic/model.hpp"
#include "cwic/trainer.hpp"
#include "doctest.h"
#include "oracles.hpp"

namespace cwic {
namespace {

using testing::RandomCuboid;

ModelConfig SmallConfig() {
  ModelConfig c;
  c.network.stage_channels = {3, 3, 4};
  c.network.dense_convs = {1};
  c.network.code_channels = 4;
  c.importance.code_channels = 4;
  c.importance.levels = 2;
  c.importance.rate = 0.5;
  c.quant_levels = 3;
  c.tcae_groups = 2;
  c.tcae_importance_groups = 3;
  c.tcae_kernel = 3;
  c.tcae_blocks = 1;
  return c;
}

ModelBundle SmallModel(uint64_t seed) {
  std::mt19937_64 rng(seed);
  ModelBundle b = ModelBundle::Random(SmallConfig(), rng);
  FinalizeModel(b);
  return b;
}

ErrorKind KindOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::kInternal;
}

TEST_SUITE("codec") {
  TEST_CASE("encoding is deterministic") {
    const ModelBundle b = SmallModel(71);
    std::mt19937_64 rng(72);
    const ImagePlane x = RandomCuboid(rng, 3, 24, 16, 0.0, 1.0);
    CHECK(EncodeImage(b, x, false) == EncodeImage(b, x, false));
    CHECK(EncodeImage(b, x, false, 1) == EncodeImage(b, x, false, 3));
  }

  TEST_CASE("decoded image equals the decoder applied to the encoder's z") {
    const ModelBundle b = SmallModel(73);
    std::mt19937_64 rng(74);
    const ImagePlane x = RandomCuboid(rng, 3, 16, 24, 0.0, 1.0);
    const ImageCodes codes = AnalyzeImage(b, x);
    EncodeStats stats;
    const std::vector<uint8_t> bytes = EncodeImage(b, x, false, 1, &stats);
    CHECK(stats.bytes == bytes.size());
    CHECK(stats.mask_sum == MaskSum(codes.mask));
    CHECK(stats.bpp == doctest::Approx(8.0 * bytes.size() / (16 * 24)));
    for (bool parallel : {false, true}) {
      CodecOptions opt;
      opt.parallel_planes = parallel;
      DecodedCodes decoded;
      const ImagePlane y = DecodeImage(b, bytes, opt, &decoded);
      CHECK(decoded.z == codes.z);
      CHECK(decoded.remapped == codes.remapped);
      ImagePlane ref = DecoderForward(b.nets, codes.z);
      for (double& v : ref.values()) v = std::clamp(v, 0.0, 1.0);
      CHECK(y == ref);
    }
  }

  TEST_CASE("odd-sized images need auto-pad and decode to the true size") {
    const ModelBundle b = SmallModel(75);
    std::mt19937_64 rng(76);
    const ImagePlane x = RandomCuboid(rng, 3, 13, 21, 0.0, 1.0);
    CHECK(KindOf([&] { EncodeImage(b, x, false); }) == ErrorKind::kConfig);
    const std::vector<uint8_t> bytes = EncodeImage(b, x, true);
    const ImagePlane y = DecodeImage(b, bytes);
    CHECK(y.height() == 13);
    CHECK(y.width() == 21);
  }

  TEST_CASE("decoding with another model is a config error") {
    const ModelBundle a = SmallModel(77);
    const ModelBundle other = SmallModel(78);
    std::mt19937_64 rng(79);
    const std::vector<uint8_t> bytes =
        EncodeImage(a, RandomCuboid(rng, 3, 8, 8, 0.0, 1.0), false);
    CHECK(KindOf([&] { DecodeImage(other, bytes); }) == ErrorKind::kConfig);
  }

  TEST_CASE("masked positions carry no symbols") {
    std::mt19937_64 rng(80);
    const ModelBundle b = SmallModel(81);
    const CodeCuboid symbols(4, 3, 3, 0);
    const BinaryCuboid none(4, 3, 3, 0);
    const std::vector<uint8_t> payload = EncodeWithModel(b.code_model, symbols, none);
    CHECK(payload.size() <= 5);
    const CodeCuboid back = DecodeWithModel(b.code_model, payload, 3, 3, none);
    for (int32_t v : back.values()) CHECK(v == 0);
    CHECK(QuantizedCrossEntropy(b.code_model, symbols, none) == 0.0);
  }

  TEST_CASE("uniform baseline bits") {
    // 10 coded symbols of 3 levels and 4 positions of 2 importance levels.
    CHECK(UniformCodeBits(10, 4, 3, 2) == doctest::Approx(10 * std::log2(3.0) + 4));
  }
}

TEST_SUITE("training") {
  ModelConfig TrainConfig() {
    ModelConfig c = SmallConfig();
    c.network.stage_channels = {4, 4, 6};
    return c;
  }

  std::vector<ImagePlane> Images(int count, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<ImagePlane> out;
    for (int n = 0; n < count; ++n) out.push_back(RandomCuboid(rng, 3, 16, 16, 0.2, 0.8));
    return out;
  }

  TEST_CASE("overfitting one image lowers the distortion") {
    std::mt19937_64 rng(82);
    ModelBundle b = ModelBundle::Random(TrainConfig(), rng);
    b.config.importance.gamma = 0.0;
    TrainOptions opt;
    opt.batch_size = 1;
    opt.rates = {3e-3};
    opt.quant_lr = 0.0;
    Trainer trainer(b, opt);
    const std::vector<ImagePlane> one = Images(1, 83);
    const QuantizerParams quant = b.quantizer;
    std::vector<double> trace;
    for (int step = 0; step < 100; ++step) {
      trace.push_back(trainer.Step({&one[0]}, true).distortion);
    }
    CHECK(b.quantizer.weights() == quant.weights());
    CHECK(trace.back() < 0.5 * trace.front());
    // Decrease across consecutive 10-step windows.
    for (int w = 1; w < 10; ++w) {
      double prev = 0.0, cur = 0.0;
      for (int s = 0; s < 10; ++s) {
        prev += trace[(w - 1) * 10 + s];
        cur += trace[w * 10 + s];
      }
      CHECK(cur < prev);
    }
  }

  TEST_CASE("an inactive rate hinge contributes nothing") {
    auto run = [](double gamma) {
      std::mt19937_64 rng(84);
      ModelBundle b = ModelBundle::Random(TrainConfig(), rng);
      b.config.importance.rate = 1.0;  // the mask can never exceed n*h*w
      b.config.importance.gamma = gamma;
      TrainOptions opt;
      opt.batch_size = 2;
      opt.rates = {1e-3};
      Trainer trainer(b, opt);
      const std::vector<ImagePlane> imgs = Images(2, 85);
      for (int step = 0; step < 5; ++step) {
        const StepMetrics m = trainer.Step({&imgs[0], &imgs[1]}, false);
        CHECK(m.rate_loss == 0.0);
      }
      std::vector<double> flat;
      for (const ParamRef& ref : b.Params()) {
        flat.insert(flat.end(), ref.values->begin(), ref.values->end());
      }
      return flat;
    };
    CHECK(run(0.0) == run(10.0));
  }

  TEST_CASE("identical seeds give identical metric traces") {
    auto run = [] {
      std::mt19937_64 rng(86);
      ModelBundle b = ModelBundle::Random(TrainConfig(), rng);
      TrainOptions opt;
      opt.steps = 12;
      opt.pretrain_steps = 3;
      opt.batch_size = 2;
      opt.tcae.epochs = 1;
      std::vector<StepMetrics> trace;
      TrainModel(b, Images(6, 87), opt,
                 [&](const StepMetrics& m) { trace.push_back(m); });
      std::vector<double> flat;
      for (const StepMetrics& m : trace) {
        flat.insert(flat.end(), {m.distortion, m.rate_loss, m.quant_loss,
                                 m.mask_sum, m.bpp_estimate, m.learning_rate});
      }
      return std::pair{flat, SaveModel(b)};
    };
    const auto a = run();
    const auto b = run();
    CHECK(a.first.size() == 6 * 12);
    CHECK(a.first == b.first);
    CHECK(a.second == b.second);
  }

  TEST_CASE("non-finite inputs are reported as numeric errors") {
    std::mt19937_64 rng(88);
    ModelBundle b = ModelBundle::Random(TrainConfig(), rng);
    TrainOptions opt;
    Trainer trainer(b, opt);
    ImagePlane bad(3, 16, 16, 0.5);
    bad[7] = std::nan("");
    CHECK(KindOf([&] { trainer.Step({&bad}, false); }) == ErrorKind::kNumeric);
  }
}

}  // namespace
}  // namespace cwic
