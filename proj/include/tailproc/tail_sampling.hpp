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

// Monte-Carlo cross-checks that sample directly from a finite tail law,
// compared against the exact values from calculus.hpp.

#ifndef TAILPROC_TAIL_SAMPLING_HPP_
#define TAILPROC_TAIL_SAMPLING_HPP_

#include <cstdint>
#include <vector>

#include "tailproc/atomic_dist.hpp"
#include "tailproc/lattice_seq.hpp"
#include "tailproc/stats.hpp"

namespace tailproc {

struct SamplingOptions {
  std::int64_t n_samples = 1'000'000;
  std::uint64_t seed = 0;
  int workers = 1;
  int half_width = 2;  // exceedance-pattern window
};

// Draws atoms by inverse CDF over the cumulative weights.
class AtomSampler {
 public:
  explicit AtomSampler(const AtomicDist& dist);
  std::size_t Draw(double u) const;

 private:
  std::vector<double> cumulative_;
};

struct McReport {
  std::vector<Cell> cells;
  double critical_z = 3.0;  // simultaneous critical value for `cells`
  std::int64_t n_samples = 0;

  double max_abs_z() const { return MaxAbsZ(cells); }
  bool consistent() const { return max_abs_z() <= critical_z; }
  // Largest |empirical - exact| and the matching critical half width.
  double max_discrepancy() const;
  double discrepancy_half_width() const;
};

struct StationarityReport : McReport {
  // Fraction of samples where tau moved the origin.
  double moved_fraction = 0.0;
};

// Samples Y = P * Theta, applies the origin shift chosen by tau, and compares
// the exceedance pattern and the origin magnitude of the shifted sample with
// the exact law of Y.
StationarityReport ExceedanceStationarityMc(const TailModel& model,
                                            const ExceedanceMap& tau,
                                            const SamplingOptions& options);

struct AnchoredSamplingReport : McReport {
  double acceptance_rate = 0.0;
  double acceptance_sigma = 0.0;
  double exact_theta = 0.0;
  std::int64_t accepted = 0;
};

// Keeps samples of Y with anchor at the origin. Cells: the acceptance rate,
// the canonical atom of the accepted samples against the exact anchored law,
// and the bucketed norm against Pareto(alpha). Throws
// kSamplingBudgetExceeded if nothing is accepted.
AnchoredSamplingReport AnchoredLawFromTailMc(const TailModel& model,
                                             Anchor anchor,
                                             const SamplingOptions& options);

struct SizeBiasedReport : McReport {
  double mean_exceedances = 0.0;
  double mean_exceedances_sigma = 0.0;
  double exact_mean_exceedances = 0.0;
};

// Samples Z = P * Q, weights each sample by |e(Z)| and moves the origin to
// a uniform exceedance point. The weighted pattern law is compared with the
// exact law of the matching tail process.
SizeBiasedReport SizeBiasedTailFromAnchoredMc(const AnchoredModel& model,
                                              const SamplingOptions& options);

}  // namespace tailproc

#endif  // TAILPROC_TAIL_SAMPLING_HPP_
