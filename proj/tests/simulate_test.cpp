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

#include "tailproc/simulate.hpp"

#include <cmath>
#include <cstring>

#include "gtest/gtest.h"
#include "tailproc/error.hpp"
#include "tailproc/models.hpp"

namespace tailproc {
namespace {

LatticeSeq S(const char* text) { return ParseSequence(text); }

bool BitEqual(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

std::int64_t CountAbove(const std::vector<double>& x, double c) {
  std::int64_t k = 0;
  for (double v : x) k += std::abs(v) > c;
  return k;
}

TEST(SimulateTest, PathViewMatchesSimulatedPath) {
  for (const char* name : {"iid", "example-5.1", "example-5.2", "three-lag-remark"}) {
    const MAStencilModel m = MakePreset(name, {1.2, 0.5, 0.7});
    const RowTable rows(m);
    const std::vector<double> x = SimulatePath(rows, 42, 3, 5000);
    const PathView view(rows, 42, 3);
    for (std::int64_t i = 0; i < 5000; ++i) {
      ASSERT_TRUE(BitEqual(view.X(i), x[static_cast<std::size_t>(i)])) << name << " " << i;
    }
  }
}

TEST(SimulateTest, SegmentsAndWorkersAgree) {
  const RowTable rows(MakePreset("three-lag-remark", {1.0, 0.5, 1.0}));
  const std::vector<double> x = SimulatePath(rows, 9, 0, 300000);
  const std::vector<double> y = SimulatePath(rows, 9, 0, 300000, 4);
  ASSERT_EQ(x.size(), y.size());
  for (std::size_t i = 0; i < x.size(); ++i) ASSERT_TRUE(BitEqual(x[i], y[i])) << i;
  std::vector<double> seg(1000);
  SimulateSegment(rows, 9, 0, 123456, seg);
  for (std::size_t i = 0; i < seg.size(); ++i) ASSERT_TRUE(BitEqual(seg[i], x[123456 + i]));
  EXPECT_FALSE(BitEqual(SimulatePath(rows, 9, 1, 10)[5], x[5]));
  EXPECT_FALSE(BitEqual(SimulatePath(rows, 10, 0, 10)[5], x[5]));
}

TEST(SimulateTest, ExceedanceScanMatchesDenseScan) {
  for (const char* name : {"iid", "example-5.1", "example-5.2", "three-lag-remark"}) {
    const MAStencilModel m = MakePreset(name, {0.9, 0.7, 1.5});
    const RowTable rows(m);
    const std::int64_t n = 200000;
    const std::vector<double> x = SimulatePath(rows, 5, 2, n);
    const PathView view(rows, 5, 2);
    for (double c : {3.0, 50.0, 2000.0}) {
      std::vector<std::int64_t> dense;
      for (std::int64_t i = 0; i < n; ++i) {
        if (std::abs(x[static_cast<std::size_t>(i)]) > c) dense.push_back(i);
      }
      EXPECT_EQ(view.Exceedances(0, n, c), dense) << name << " " << c;
      EXPECT_EQ(view.Exceedances(0, n, c, 4), dense) << name << " " << c;
      std::vector<std::int64_t> part;
      for (std::int64_t i : dense) {
        if (i >= 777 && i < 150000) part.push_back(i);
      }
      EXPECT_EQ(view.Exceedances(777, 150000, c), part);
    }
  }
}

TEST(SimulateTest, SparseClustersMatchDense) {
  const MAStencilModel m = MakePreset("example-5.1", {1.2, 1.0, 2.0});
  const RowTable rows(m);
  const AtomicDist q = MaAnchored(m).q;
  const std::int64_t n = 300000;
  const std::vector<double> x = SimulatePath(rows, 17, 0, n);
  const PathView view(rows, 17, 0);
  for (Anchor anchor : {Anchor::kFirstExceedance, Anchor::kFirstMaximum}) {
    for (double c : {20.0, 300.0}) {
      const ClusterStats a = ExtractClusters(x, c, 100, anchor, q, 1, true);
      const ClusterStats b = ExtractClusters(view, n, c, 100, anchor, q, 1, true, 2);
      EXPECT_EQ(a.n_blocks, b.n_blocks);
      EXPECT_EQ(a.n_exceedances, b.n_exceedances);
      EXPECT_EQ(a.n_clusters, b.n_clusters);
      EXPECT_EQ(a.atom_counts, b.atom_counts);
      EXPECT_EQ(a.size_histogram, b.size_histogram);
      ASSERT_EQ(a.clusters.size(), b.clusters.size());
      for (std::size_t i = 0; i < a.clusters.size(); ++i) {
        EXPECT_EQ(a.clusters[i].anchor, b.clusters[i].anchor);
        EXPECT_EQ(a.clusters[i].atom, b.clusters[i].atom);
        EXPECT_EQ(a.clusters[i].norm, b.clusters[i].norm);
      }
      EXPECT_EQ(a.n_exceedances, CountAbove(x, c));
    }
  }
}

TEST(SimulateTest, ClusterExtractionOnHandPath) {
  const AtomicDist q({{S("0:1"), 0.5}, {S("0:1,1:0.5"), 0.5}});
  // Blocks of 4: [0 5 2.5 0] [0 0 0 0] [3 0 0 0] [0 0 0 9]; c = 2.
  const std::vector<double> x = {0, 5, 2.5, 0, 0, 0, 0, 0, 3, 0, 0, 0, 0, 0, 0, 9, 7};
  const ClusterStats s = ExtractClusters(x, 2.0, 4, Anchor::kFirstMaximum, q, 1, true);
  EXPECT_EQ(s.n_blocks, 4);
  EXPECT_EQ(s.n_clusters, 3);
  EXPECT_EQ(s.n_exceedances, 4);  // the trailing 7 is outside k_n r_n
  ASSERT_EQ(s.clusters.size(), 3u);
  EXPECT_EQ(s.clusters[0].anchor, 1);
  EXPECT_EQ(s.clusters[0].exceedances, 2);
  EXPECT_DOUBLE_EQ(s.clusters[0].norm, 2.5);
  EXPECT_EQ(s.clusters[0].atom, 1);
  EXPECT_EQ(s.clusters[1].atom, 0);
  EXPECT_EQ(s.size_histogram.at(1), 2);
  EXPECT_EQ(s.size_histogram.at(2), 1);
  EXPECT_EQ(s.atom_counts, (std::vector<std::int64_t>{2, 1}));
}

TEST(SimulateTest, NearestAtomTriesAlignments) {
  const AtomicDist q({{S("0:1"), 0.3}, {S("-1:0.5,0:1"), 0.3}, {S("0:1,1:0.9"), 0.4}});
  const std::vector<double> block = {0.0, 2.0, 4.0, 0.0};
  EXPECT_EQ(NearestAtom(block, 2, 4.0, q, 1), 1);
  EXPECT_EQ(NearestAtom(std::vector<double>{0.0, 4.0, 3.5}, 1, 4.0, q, 1), 2);
  EXPECT_EQ(NearestAtom(block, 2, 4.0, AtomicDist(), 1), -1);
}

TEST(SimulateTest, MarginalTailMatchesTailConstant) {
  // P(|X_0| > x) ~ sum_k E|C_k|^alpha x^-alpha; with b = 1 that is 3/2.
  const MAStencilModel m = MakePreset("example-1.1", {1.0, 1.0, 1.0});
  const RowTable rows(m);
  const PathView view(rows, 1, 0);
  const double x = 200.0;
  const std::int64_t n = 4'000'000;
  const double count = static_cast<double>(view.Exceedances(0, n, x).size());
  const double expected = n * TailConstant(m) / x;
  EXPECT_LT(std::abs(count - expected), 4.0 * std::sqrt(expected)) << count << " vs " << expected;
}

TEST(SimulateTest, IidPathIsPareto) {
  const double alpha = 1.5;
  const RowTable rows(MakePreset("iid", {alpha, 0.3, 1.0}));
  const std::vector<double> x = SimulatePath(rows, 2, 0, 400000);
  std::int64_t negative = 0;
  for (double v : x) {
    ASSERT_GT(std::abs(v), 1.0);
    negative += v < 0.0;
  }
  const double n = static_cast<double>(x.size());
  EXPECT_NEAR(negative / n, 0.7, 4.0 * std::sqrt(0.21 / n));
  const double p = std::pow(4.0, -alpha);
  EXPECT_NEAR(CountAbove(x, 4.0) / n, p, 4.0 * std::sqrt(p * (1 - p) / n));
}

TEST(SimulateTest, GlobalMarkIsSharedAlongThePath) {
  const RowTable rows(MakePreset("example-5.2", {1.0, 1.0, 1.0}));
  int shared = 0;
  for (std::uint64_t path = 0; path < 40; ++path) {
    const PathView view(rows, 3, path);
    const double* first = view.RowAt(0);
    bool same = true;
    for (std::int64_t i = 1; i < 500; ++i) same = same && view.RowAt(i)[1] == first[1];
    EXPECT_TRUE(same);
    shared += first[1] == 1.0;
  }
  EXPECT_GT(shared, 5);
  EXPECT_LT(shared, 35);
}

TEST(SimulateTest, ThresholdCalibration) {
  const double alpha = 1.2;
  const MAStencilModel iid = MakePreset("iid", {alpha, 1.0, 1.0});
  const Threshold t = CalibrateThreshold(iid, 1e-3);
  const double exact = std::pow(1e-3, -1.0 / alpha);
  EXPECT_NEAR(t.value / exact, 1.0, 0.05);
  EXPECT_GT(t.rel_sigma, 0.0);
  EXPECT_LT(t.rel_sigma, 0.05);
  EXPECT_EQ(CalibrateThreshold(iid, 1e-3).value, t.value);

  PathConfig cfg;
  cfg.threshold = 12.5;
  EXPECT_EQ(ResolveThreshold(iid, cfg).value, 12.5);
}

TEST(SimulateTest, PathConfigChecks) {
  PathConfig cfg;
  cfg.n = 10000;
  EXPECT_EQ(cfg.BlockLength(), static_cast<std::int64_t>(std::floor(std::pow(10000.0, 0.4))));
  cfg.block_len = 50;
  EXPECT_EQ(cfg.BlockLength(), 50);
  EXPECT_NO_THROW(cfg.Check(2));
  cfg.block_len = 1;
  EXPECT_THROW(cfg.Check(3), Error);
  cfg.block_len = 0;
  cfg.n = 0;
  EXPECT_THROW(cfg.Check(1), Error);
}

}  // namespace
}  // namespace tailproc
