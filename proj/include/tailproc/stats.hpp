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

// Small statistics helpers shared by the Monte-Carlo checks.

#ifndef TAILPROC_STATS_HPP_
#define TAILPROC_STATS_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace tailproc {

// One compared quantity: an empirical estimate, its exact target and the
// standard error under the target.
struct Cell {
  std::string label;
  double empirical = 0.0;
  double exact = 0.0;
  double sigma = 0.0;

  // (empirical - exact) / sigma; 0 when both sigma and the gap vanish.
  double z() const;
};

// sqrt(p (1 - p) / n).
double BinomialSigma(double p, double n);

// Two-sided normal critical value keeping the family-wise error at
// `family_level` over `count` simultaneous comparisons.
double BonferroniCritical(double family_level, std::size_t count);

double MaxAbsZ(const std::vector<Cell>& cells);

// Poisson(lambda) probability mass.
double PoissonPmf(std::int64_t k, double lambda);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
  // Merged bins: [first_count, last_count], observed, expected. The last
  // bin is open ended.
  struct Bin {
    std::int64_t first;
    std::int64_t last;
    double observed;
    double expected;
  };
  std::vector<Bin> bins;
};

// Goodness of fit of observed counts (value -> frequency) against
// Poisson(lambda). Adjacent bins are merged until each expects >= 5.
ChiSquareResult PoissonChiSquare(const std::map<std::int64_t, std::int64_t>& counts,
                                 double lambda);

// 0.5 * sum |p - q| over the union of keys.
template <typename Key>
double TotalVariation(const std::map<Key, double>& p,
                      const std::map<Key, double>& q) {
  double sum = 0.0;
  for (const auto& [k, v] : p) {
    auto it = q.find(k);
    sum += it == q.end() ? v : (v > it->second ? v - it->second : it->second - v);
  }
  for (const auto& [k, v] : q) {
    if (!p.count(k)) sum += v;
  }
  return 0.5 * sum;
}

// Log-spaced buckets for a Pareto(alpha) magnitude on (1, inf): `count`
// equal-width buckets in log scale up to the 0.999 quantile, then one open
// tail bucket.
class MagnitudeBuckets {
 public:
  explicit MagnitudeBuckets(double alpha, int count = 32);

  int size() const { return count_ + 1; }
  int Index(double magnitude) const;
  double ExactProbability(int bucket) const;
  std::string Label(int bucket) const;

 private:
  double alpha_;
  int count_;
  double log_upper_;
};

}  // namespace tailproc

#endif  // TAILPROC_STATS_HPP_
