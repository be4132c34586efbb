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

#include "tailproc/lattice_seq.hpp"

#include <random>
#include <set>

#include "gtest/gtest.h"
#include "tailproc/error.hpp"

namespace tailproc {
namespace {

LatticeSeq S(const char* text) { return ParseSequence(text); }

// Random sequences with at least one exceedance at the origin.
std::vector<LatticeSeq> RandomE0(int count, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<int> len(1, 7);
  std::uniform_int_distribution<int> idx(-6, 6);
  std::uniform_real_distribution<double> mag(0.2, 3.0);
  std::bernoulli_distribution neg(0.3);
  std::vector<LatticeSeq> out;
  while (static_cast<int>(out.size()) < count) {
    std::map<std::int64_t, double> m;
    m[0] = 1.5 + mag(gen);
    for (int r = len(gen); r > 0; --r) {
      const double v = mag(gen);
      m[idx(gen)] = neg(gen) ? -v : v;
    }
    if (std::abs(m[0]) <= 1.0) m[0] = 2.0;
    std::vector<SeqEntry> e;
    for (const auto& [i, v] : m) e.push_back({i, v});
    out.emplace_back(e);
  }
  return out;
}

TEST(LatticeSeqTest, ParsesAndPrints) {
  const LatticeSeq x = S("1:3, -1:0.5 ,0:2");
  EXPECT_EQ(x.support_size(), 3u);
  EXPECT_EQ(x[-1], 0.5);
  EXPECT_EQ(x[7], 0.0);
  EXPECT_EQ(x.ToString(), "-1:0.5,0:2,1:3");
  EXPECT_EQ(S(x.ToString().c_str()), x);
  EXPECT_TRUE(S("").empty());
  EXPECT_TRUE(S("0:0").empty());
}

TEST(LatticeSeqTest, RejectsBadInput) {
  EXPECT_THROW(S("0:1,0:2"), Error);
  EXPECT_THROW(S("0:nan"), Error);
  EXPECT_THROW(S("0:inf"), Error);
  EXPECT_THROW(S("x:1"), Error);
  EXPECT_THROW(S("0-1"), Error);
  try {
    S("0:1,0:2");
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidSequence);
  }
}

TEST(LatticeSeqTest, ShiftExamples) {
  const LatticeSeq x = S("0:2,1:3");
  EXPECT_EQ(Shift(x, 0), x);
  EXPECT_EQ(Shift(x, 1), S("-1:2,0:3"));
  for (const auto& y : RandomE0(50, 1)) {
    for (int k = -4; k <= 4; ++k) EXPECT_EQ(Shift(Shift(y, k), -k), y);
  }
}

TEST(LatticeSeqTest, ExceedanceSetIsStrict) {
  EXPECT_EQ(ExceedanceSetOf(S("0:2,3:0.5")).indices, (std::vector<std::int64_t>{0}));
  EXPECT_EQ(ExceedanceSetOf(S("-1:-1.5,0:1")).indices, (std::vector<std::int64_t>{-1}));
  EXPECT_EQ(ExceedanceSetOf(S("0:2,1:2")).indices, (std::vector<std::int64_t>{0, 1}));
  EXPECT_EQ(ExceedanceCount(S("0:1")), 0u);
}

TEST(LatticeSeqTest, SupNormAndMass) {
  EXPECT_EQ(SupNorm(S("0:1,1:-3")), 3.0);
  EXPECT_EQ(SupNorm(LatticeSeq()), 0.0);
  for (double b : {0.5, 1.0, 2.5}) {
    const LatticeSeq c({{0, 1.0}, {1, b}});
    EXPECT_EQ(SupNorm(c), std::max(1.0, b));
  }
  EXPECT_DOUBLE_EQ(AlphaMass(S("0:2,1:-1"), 2.0), 5.0);
}

TEST(LatticeSeqTest, Anchors) {
  EXPECT_EQ(AnchorFirstExceedance(S("-2:1.5,0:2")), -2);
  EXPECT_EQ(AnchorFirstExceedance(S("0:2")), 0);
  EXPECT_EQ(AnchorFirstMaximum(S("0:1,1:1")), 0);
  const double b = 3.0;
  EXPECT_EQ(AnchorFirstMaximum(LatticeSeq({{-1, 1.0 / b}, {0, 1.0}})), 0);
  EXPECT_THROW(AnchorFirstExceedance(S("0:1")), Error);
  EXPECT_THROW(AnchorFirstMaximum(LatticeSeq()), Error);
  for (const auto& x : RandomE0(100, 2)) {
    EXPECT_EQ(AnchorFirstMaximum(x.Scaled(2.0)), AnchorFirstMaximum(x));
    for (std::int64_t k : ExceedanceSetOf(x).indices) {
      for (Anchor a : {Anchor::kFirstExceedance, Anchor::kFirstMaximum}) {
        EXPECT_EQ(AnchorOf(a, Shift(x, k)) + k, AnchorOf(a, x));
      }
    }
  }
}

TEST(LatticeSeqTest, ExactlyOneExceedanceIsTheAnchor) {
  for (const auto& x : RandomE0(100, 3)) {
    for (Anchor a : {Anchor::kFirstExceedance, Anchor::kFirstMaximum}) {
      int hits = 0;
      std::set<std::string> forms;
      for (std::int64_t k : ExceedanceSetOf(x).indices) {
        const LatticeSeq y = Shift(x, k);
        if (AnchorOf(a, y) == 0) ++hits;
        forms.insert(ExceedanceShift(y, AnchorMap(a)).ToString());
      }
      EXPECT_EQ(hits, 1) << x.ToString();
      EXPECT_EQ(forms.size(), 1u) << x.ToString();
    }
  }
}

TEST(LatticeSeqTest, CyclicMap) {
  EXPECT_EQ(TauCyclic(S("0:2"), 1), 0);
  EXPECT_EQ(TauCyclic(S("0:2"), 5), 0);
  const LatticeSeq x = S("-1:2,0:2,2:2");
  EXPECT_EQ(TauCyclic(x, 1), 2);
  EXPECT_EQ(TauCyclic(x, 2), -1);
  EXPECT_EQ(TauCyclic(x, 3), 0);
  EXPECT_EQ(TauCyclic(x, -1), -1);
  EXPECT_THROW(TauCyclic(S("0:0.5,1:2"), 1), Error);
}

TEST(LatticeSeqTest, NearestMap) {
  EXPECT_EQ(TauNearest(S("0:2")), 0);
  EXPECT_EQ(TauNearest(S("0:2,1:2")), 1);
  const LatticeSeq x = S("0:2,1:2,5:2");
  EXPECT_EQ(TauNearest(x), 1);
  EXPECT_EQ(TauNearest(Shift(x, 5)), 0);
  EXPECT_EQ(AssociatedIndex(x, NearestMap(), 5), 5);
}

TEST(LatticeSeqTest, MapsAreBijectiveOnExceedances) {
  for (const auto& x : RandomE0(200, 4)) {
    for (int n = -3; n <= 3; ++n) EXPECT_TRUE(IsBijectiveOn(x, CyclicMap(n))) << x.ToString();
    EXPECT_TRUE(IsBijectiveOn(x, NearestMap())) << x.ToString();
  }
  // Anchors send every exceedance to the same point.
  const LatticeSeq two = S("0:2,1:3");
  EXPECT_FALSE(IsBijectiveOn(two, AnchorMap(Anchor::kFirstExceedance)));
}

TEST(LatticeSeqTest, ExceedanceShift) {
  const LatticeSeq x = S("-2:1.5,0:2");
  EXPECT_EQ(ExceedanceShift(x, [](const LatticeSeq&) { return std::int64_t{0}; }), x);
  EXPECT_EQ(ExceedanceShift(x, AnchorMap(Anchor::kFirstExceedance)), S("0:1.5,2:2"));
  for (const auto& y : RandomE0(100, 5)) {
    for (int n = 0; n <= 3; ++n) {
      for (int m = 0; m <= 3; ++m) {
        EXPECT_EQ(ExceedanceShift(ExceedanceShift(y, CyclicMap(n)), CyclicMap(m)),
                  ExceedanceShift(y, CyclicMap(n + m)));
      }
    }
  }
}

TEST(LatticeSeqTest, CanonicalizeModShift) {
  EXPECT_EQ(CanonicalizeModShift(S("0:2")), S("0:2"));
  EXPECT_EQ(CanonicalizeModShift(S("3:2,4:1")), S("0:2,1:1"));
  for (const auto& y : RandomE0(100, 6)) {
    for (int k = -5; k <= 5; ++k) EXPECT_EQ(CanonicalizeModShift(Shift(y, k)), CanonicalizeModShift(y));
  }
}

TEST(LatticeSeqTest, ApproxComparison) {
  const LatticeSeq a = S("0:1,1:0.3");
  const LatticeSeq b({{0, 1.0}, {1, 0.3 * (1 + 1e-14)}});
  EXPECT_TRUE(ApproxEqual(a, b));
  EXPECT_EQ(CompareApprox(a, b), 0);
  EXPECT_FALSE(ApproxEqual(a, S("0:1,1:0.31")));
  EXPECT_NE(CompareApprox(a, S("0:1")), 0);
  EXPECT_EQ(CompareApprox(a, S("0:1,1:0.31")), -CompareApprox(S("0:1,1:0.31"), a));
}

TEST(LatticeSeqTest, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 2.0, -1e-300, 6.02e23}) {
    EXPECT_EQ(std::stod(FormatDouble(v)), v);
  }
}

}  // namespace
}  // namespace tailproc
