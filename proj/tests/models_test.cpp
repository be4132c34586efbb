// Copyright 2026 The tailproc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tailproc/models.hpp"

#include <cmath>
#include <functional>

#include "gtest/gtest.h"
#include "oracles.hpp"
#include "tailproc/calculus.hpp"
#include "tailproc/error.hpp"

namespace tailproc {
namespace {

LatticeSeq S(const char* text) { return ParseSequence(text); }

ErrorCode CodeOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIoError;
}

std::string MessageOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

TEST(ModelsTest, DiagonalLawOfPresets) {
  const AtomicDist two = DiagonalLaw(MakePreset("example-5.1", {1.2, 1.0, 0.5}));
  ASSERT_EQ(two.size(), 2u);
  EXPECT_DOUBLE_EQ(two.WeightOf(S("0:1")), 0.5);
  EXPECT_DOUBLE_EQ(two.WeightOf(S("0:1,1:0.5")), 0.5);

  const AtomicDist three = DiagonalLaw(MakePreset("three-lag-remark", {}));
  ASSERT_EQ(three.size(), 4u);
  for (const char* s : {"0:1", "0:1,1:1", "0:1,2:1", "0:1,1:1,2:1"}) {
    EXPECT_DOUBLE_EQ(three.WeightOf(S(s)), 0.25) << s;
  }

  const MAStencilModel fixed = MakeStencilModel("fixed", {1.5, 1.0}, {}, {"1", "-0.5", "2"},
                                                MarkSharing::kPerIndex);
  const AtomicDist one = DiagonalLaw(fixed);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one.atoms()[0].seq, S("0:1,1:-0.5,2:2"));
}

TEST(ModelsTest, SpectralLawOfTwoLagModel) {
  for (double b : {0.3, 1.0, 2.0}) {
    const double alpha = 1.3;
    const double ba = std::pow(b, alpha);
    const TailModel m = MaSpectral(MakePreset("example-5.1", {alpha, 1.0, b}));
    ASSERT_EQ(m.spectral.size(), 3u);
    EXPECT_NEAR(m.spectral.WeightOf(S("0:1")), 1.0 / (2.0 + ba), 1e-14);
    EXPECT_NEAR(m.spectral.WeightOf(LatticeSeq({{0, 1.0}, {1, b}})), 1.0 / (2.0 + ba), 1e-14);
    EXPECT_NEAR(m.spectral.WeightOf(LatticeSeq({{-1, 1.0 / b}, {0, 1.0}})), ba / (2.0 + ba),
                1e-14);
    EXPECT_NEAR(TailConstant(MakePreset("example-5.1", {alpha, 1.0, b})), 1.0 + ba / 2.0, 1e-14);
  }
  const TailModel eleven = MaSpectral(MakePreset("example-1.1", {}));
  for (const auto& a : eleven.spectral.atoms()) EXPECT_NEAR(a.weight, 1.0 / 3.0, 1e-14);
  const TailModel iid = MaSpectral(MakePreset("iid", {}));
  EXPECT_TRUE(iid.spectral.ApproxEquals(AtomicDist::Dirac(S("0:1"))));
}

TEST(ModelsTest, SignsSplitAtoms) {
  const TailModel m = MaSpectral(MakePreset("iid", {1.0, 0.25, 1.0}));
  EXPECT_DOUBLE_EQ(m.spectral.WeightOf(S("0:1")), 0.25);
  EXPECT_DOUBLE_EQ(m.spectral.WeightOf(S("0:-1")), 0.75);
}

TEST(ModelsTest, AnchoredLaw) {
  const double alpha = 1.1;
  for (double b : {0.4, 1.0, 2.5}) {
    const AnchoredModel q = MaAnchored(MakePreset("example-5.1", {alpha, 1.0, b}));
    if (b <= 1.0) {
      EXPECT_TRUE(q.q.ApproxEquals(DiagonalLaw(MakePreset("example-5.1", {alpha, 1.0, b}))));
    } else {
      const double ba = std::pow(b, alpha);
      EXPECT_NEAR(q.q.WeightOf(S("0:1")), 1.0 / (1.0 + ba), 1e-14);
      EXPECT_NEAR(q.q.WeightOf(LatticeSeq({{-1, 1.0 / b}, {0, 1.0}})), ba / (1.0 + ba), 1e-14);
    }
  }
  const MAStencilModel fixed = MakeStencilModel("fixed", {1.5, 1.0}, {}, {"1", "-4", "2"},
                                                MarkSharing::kPerIndex);
  const AnchoredModel q = MaAnchored(fixed);
  ASSERT_EQ(q.q.size(), 1u);
  EXPECT_EQ(q.q.atoms()[0].seq, S("-1:0.25,0:-1,1:0.5"));
}

TEST(ModelsTest, ExtremalIndex) {
  const double alpha = 0.9;
  for (double b : {0.5, 1.0, 1.5, 4.0}) {
    const double ba = std::pow(b, alpha);
    const double expected = b <= 1.0 ? 2.0 / (2.0 + ba) : (1.0 + ba) / (2.0 + ba);
    EXPECT_NEAR(MaExtremalIndex(MakePreset("example-5.1", {alpha, 1.0, b})), expected, 1e-14);
  }
  EXPECT_DOUBLE_EQ(MaExtremalIndex(MakePreset("iid", {})), 1.0);
}

TEST(ModelsTest, CorpusAgreesWithOracles) {
  for (const auto& model : oracle::RandomCorpus(60, 21)) {
    const TailModel m = MaSpectral(model);
    EXPECT_LE(oracle::MaxGap(oracle::FromDist(m.spectral), oracle::Spectral(model)), 1e-12)
        << model.name;
    EXPECT_LE(oracle::MaxGap(oracle::FromDist(DiagonalLaw(model)),
                             oracle::Normalize(oracle::Diagonal(model))),
              1e-12)
        << model.name;
    const AnchoredModel q = MaAnchored(model);
    EXPECT_LE(oracle::MaxGap(oracle::FromDist(q.q), oracle::Anchored(model)), 1e-12)
        << model.name;
    EXPECT_LE(AnchoredFromSpectral(m).q.MaxWeightDifference(q.q), 1e-12) << model.name;
    const double theta = oracle::Theta(model);
    EXPECT_NEAR(MaExtremalIndex(model), theta, 1e-10) << model.name;
    EXPECT_NEAR(ExtremalIndexSpectral(m), theta, 1e-10) << model.name;
    EXPECT_NEAR(ExtremalIndexInverseCount(m), theta, 1e-10) << model.name;
  }
}

TEST(ModelsTest, GlobalMarkMatchesPerIndexForOneMarkStencil) {
  const PresetParams params{1.4, 1.0, 1.0};
  const MAStencilModel global = MakePreset("example-5.2", params);
  const MAStencilModel local = MakePreset("example-1.1", params);
  EXPECT_TRUE(DiagonalLaw(global).ApproxEquals(DiagonalLaw(local)));
  EXPECT_TRUE(MaSpectral(global).spectral.ApproxEquals(MaSpectral(local).spectral));
  EXPECT_TRUE(MaAnchored(global).q.ApproxEquals(MaAnchored(local).q));
}

TEST(ModelsTest, RandomizedOriginLimit) {
  // Seen from a random exceedance: the zero mark gives i.i.d. behaviour, the
  // unit mark splits between the two exceedances of each cluster.
  const TailModel y = RandomizedOriginLimit(MakePreset("example-5.2", {}));
  ASSERT_EQ(y.spectral.size(), 3u);
  EXPECT_NEAR(y.spectral.WeightOf(S("0:1")), 0.5, 1e-14);
  EXPECT_NEAR(y.spectral.WeightOf(S("0:1,1:1")), 0.25, 1e-14);
  EXPECT_NEAR(y.spectral.WeightOf(S("-1:1,0:1")), 0.25, 1e-14);
  EXPECT_TRUE(TcfCheck(y).valid);
  const MAStencilModel local = MakePreset("example-5.1", {1.2, 1.0, 0.5});
  EXPECT_TRUE(RandomizedOriginLimit(local).spectral.ApproxEquals(MaSpectral(local).spectral));
}

TEST(ModelsTest, DegenerateAndMalformed) {
  EXPECT_EQ(CodeOf([] { MakePreset("nope", {}); }), ErrorCode::kConfigError);
  EXPECT_EQ(CodeOf([] { MakePreset("example-5.1", {1.0, 1.0, 0.0}); }), ErrorCode::kConfigError);
  const MarkLaw coin{"e", {0.0, 1.0}, {0.5, 0.5}};
  EXPECT_EQ(CodeOf([&] {
              MaSpectral(MakeStencilModel("z", {1.0, 1.0}, {coin}, {"e"}, MarkSharing::kPerIndex));
            }),
            ErrorCode::kDegenerateModel);
  EXPECT_EQ(CodeOf([&] {
              MaSpectral(MakeStencilModel("z", {1.0, 1.0}, {}, {"0"}, MarkSharing::kPerIndex));
            }),
            ErrorCode::kDegenerateModel);
  EXPECT_EQ(CodeOf([&] {
              MakeStencilModel("a", {-1.0, 1.0}, {}, {"1"}, MarkSharing::kPerIndex);
            }),
            ErrorCode::kMalformedModel);
  EXPECT_EQ(CodeOf([&] {
              MakeStencilModel("p", {1.0, 1.5}, {}, {"1"}, MarkSharing::kPerIndex);
            }),
            ErrorCode::kMalformedModel);
  MarkLaw wide{"w", {}, std::vector<double>(1000, 1e-3)};
  for (int i = 0; i < 1000; ++i) wide.values.push_back(1.0 + i);
  const MAStencilModel big =
      MakeStencilModel("big", {1.0, 1.0}, {wide}, {"1", "w", "w"}, MarkSharing::kPerIndex);
  EXPECT_EQ(CodeOf([&] { DiagonalLaw(big, 1000); }), ErrorCode::kMarkSpaceTooLarge);
}

TEST(ModelsTest, ParsesJson) {
  const MAStencilModel m = ParseModelJson(R"({
    "innovation": {"alpha": 1.5, "p": 0.5},
    "params": {"b": 0.5},
    "marks": {"eps": [{"value": 0, "prob": 0.5}, {"value": 1, "prob": 0.5}]},
    "coefficients": ["1", "eps*b"],
    "mark_sharing": "global"})");
  EXPECT_EQ(m.innovation.alpha, 1.5);
  EXPECT_EQ(m.innovation.p, 0.5);
  EXPECT_EQ(m.sharing, MarkSharing::kGlobal);
  EXPECT_EQ(m.window(), 2);
  EXPECT_DOUBLE_EQ(DiagonalLaw(m).WeightOf(S("0:1,1:0.5")), 0.5);
  EXPECT_EQ(ModelFingerprint(m), ModelFingerprint(m));
  EXPECT_NE(ModelFingerprint(m), ModelFingerprint(MakePreset("example-5.1", {1.5, 0.5, 0.5})));
}

TEST(ModelsTest, JsonErrorsNameTheField) {
  EXPECT_EQ(CodeOf([] { ParseModelJson("{"); }), ErrorCode::kConfigError);
  EXPECT_NE(MessageOf([] { ParseModelJson(R"({"coefficients": ["1"]})"); }).find("innovation"),
            std::string::npos);
  EXPECT_NE(MessageOf([] {
              ParseModelJson(R"({"innovation": {"alpha": "x"}, "coefficients": ["1"]})");
            }).find("$.innovation.alpha"),
            std::string::npos);
  EXPECT_NE(MessageOf([] {
              ParseModelJson(R"({"innovation": {"alpha": 1}, "coefficients": []})");
            }).find("$.coefficients"),
            std::string::npos);
  EXPECT_EQ(CodeOf([] {
              ParseModelJson(R"({"innovation": {"alpha": 1}, "coefficients": ["q + 1"]})");
            }),
            ErrorCode::kConfigError);
}

TEST(ModelsTest, Presets) {
  for (const auto& name : PresetNames()) {
    const MAStencilModel m = MakePreset(name, {});
    EXPECT_TRUE(TcfCheck(MaSpectral(m)).valid) << name;
  }
}

}  // namespace
}  // namespace tailproc
