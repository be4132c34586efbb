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

#include "tailproc/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/poisson.hpp>

#include "tailproc/error.hpp"
#include "tailproc/lattice_seq.hpp"

namespace tailproc {

double Cell::z() const {
  const double gap = empirical - exact;
  if (sigma > 0.0) return gap / sigma;
  return gap == 0.0 ? 0.0 : std::copysign(INFINITY, gap);
}

double BinomialSigma(double p, double n) {
  if (n <= 0.0) return 0.0;
  return std::sqrt(std::max(0.0, p * (1.0 - p)) / n);
}

double BonferroniCritical(double family_level, std::size_t count) {
  const double per = family_level / static_cast<double>(std::max<std::size_t>(1, count));
  boost::math::normal_distribution<double> normal;
  return boost::math::quantile(boost::math::complement(normal, per / 2.0));
}

double MaxAbsZ(const std::vector<Cell>& cells) {
  double m = 0.0;
  for (const auto& c : cells) m = std::max(m, std::abs(c.z()));
  return m;
}

double PoissonPmf(std::int64_t k, double lambda) {
  if (k < 0) return 0.0;
  boost::math::poisson_distribution<double> dist(lambda);
  return boost::math::pdf(dist, static_cast<double>(k));
}

ChiSquareResult PoissonChiSquare(
    const std::map<std::int64_t, std::int64_t>& counts, double lambda) {
  if (!(lambda > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "Poisson mean must be positive");
  }
  double total = 0.0;
  std::int64_t max_count = 0;
  for (const auto& [k, c] : counts) {
    total += static_cast<double>(c);
    max_count = std::max(max_count, k);
  }
  if (total <= 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "no observations");
  }
  // Fine bins 0..max_count, the last one open ended.
  std::vector<ChiSquareResult::Bin> fine;
  double cdf_below = 0.0;
  for (std::int64_t k = 0; k <= max_count; ++k) {
    auto it = counts.find(k);
    const double obs = it == counts.end() ? 0.0 : static_cast<double>(it->second);
    const double p = k == max_count ? 1.0 - cdf_below : PoissonPmf(k, lambda);
    cdf_below += p;
    fine.push_back({k, k, obs, total * p});
  }
  if (max_count == 0) {
    // Only zeros observed: add the open tail so there is something to test.
    fine.back().expected = total * PoissonPmf(0, lambda);
    fine.push_back({1, 1, 0.0, total * (1.0 - PoissonPmf(0, lambda))});
  }

  // Merge left to right until each bin expects >= 5, then fold a short last
  // bin into its neighbour.
  ChiSquareResult result;
  for (const auto& b : fine) {
    if (!result.bins.empty() && result.bins.back().expected < 5.0) {
      auto& last = result.bins.back();
      last.last = b.last;
      last.observed += b.observed;
      last.expected += b.expected;
    } else {
      result.bins.push_back(b);
    }
  }
  while (result.bins.size() > 1 && result.bins.back().expected < 5.0) {
    auto tail = result.bins.back();
    result.bins.pop_back();
    auto& last = result.bins.back();
    last.last = tail.last;
    last.observed += tail.observed;
    last.expected += tail.expected;
  }
  for (const auto& b : result.bins) {
    const double d = b.observed - b.expected;
    result.statistic += d * d / b.expected;
  }
  result.dof = static_cast<int>(result.bins.size()) - 1;
  if (result.dof >= 1) {
    boost::math::chi_squared_distribution<double> chi(result.dof);
    result.p_value =
        boost::math::cdf(boost::math::complement(chi, result.statistic));
  }
  return result;
}

MagnitudeBuckets::MagnitudeBuckets(double alpha, int count)
    : alpha_(alpha), count_(count), log_upper_(std::log(1000.0) / alpha) {
  if (!(alpha > 0.0) || count < 1) {
    throw Error(ErrorCode::kInvalidArgument, "bad magnitude bucket spec");
  }
}

int MagnitudeBuckets::Index(double magnitude) const {
  const double pos = std::log(magnitude) / log_upper_ * count_;
  if (!(pos >= 0.0)) return 0;
  return std::min(count_, static_cast<int>(pos));
}

double MagnitudeBuckets::ExactProbability(int bucket) const {
  // log P is Exponential(alpha).
  const double lo = log_upper_ * bucket / count_;
  if (bucket >= count_) return std::exp(-alpha_ * lo);
  const double hi = log_upper_ * (bucket + 1) / count_;
  return std::exp(-alpha_ * lo) - std::exp(-alpha_ * hi);
}

std::string MagnitudeBuckets::Label(int bucket) const {
  const double lo = std::exp(log_upper_ * bucket / count_);
  if (bucket >= count_) return "|y|>" + FormatDouble(lo);
  const double hi = std::exp(log_upper_ * (bucket + 1) / count_);
  return "|y| in (" + FormatDouble(lo) + "," + FormatDouble(hi) + "]";
}

}  // namespace tailproc
