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

// Path simulation for finite-stencil moving averages, threshold calibration
// and block-based cluster extraction.

#ifndef TAILPROC_SIMULATE_HPP_
#define TAILPROC_SIMULATE_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "tailproc/atomic_dist.hpp"
#include "tailproc/models.hpp"
#include "tailproc/rng.hpp"

namespace tailproc {

struct PathConfig {
  std::int64_t n = 100'000;
  double r_exponent = 0.4;      // r_n = floor(n^r_exponent) unless block_len
  std::int64_t block_len = 0;   // explicit r_n when > 0
  double u_target = 1.0;        // n * P(|X_0| > c_n)
  std::optional<double> threshold;  // explicit c_n, skips calibration
  int half_width = 1;           // empirical window is [-h, h]
  std::uint64_t seed = 0;
  int workers = 1;

  std::int64_t BlockLength() const;
  // Throws kInvalidArgument when the configuration is inconsistent with the
  // model's window.
  void Check(int stencil_window) const;
};

// Draws rows of coefficients by their probabilities.
class RowTable {
 public:
  explicit RowTable(const MAStencilModel& model);

  const MAStencilModel& model() const { return *model_; }
  int window() const { return window_; }
  std::size_t size() const { return probs_cum_.size(); }
  const double* Row(std::size_t r) const { return &coef_[r * static_cast<std::size_t>(window_)]; }
  std::size_t Draw(double u) const;
  // max over rows of sum_k |C_k|; |X_i| <= this times max_k |Z_{i-k}|.
  double MaxAbsRowSum() const { return max_abs_row_sum_; }

 private:
  const MAStencilModel* model_;
  int window_;
  std::vector<double> coef_;  // row-major, window_ entries per row
  std::vector<double> probs_cum_;
  double max_abs_row_sum_ = 0.0;
};

// Random access to one path. X(i) is bit-identical to the value
// SimulatePath writes at index i.
class PathView {
 public:
  PathView(const RowTable& rows, std::uint64_t seed, std::uint64_t path_id);

  double Z(std::int64_t j) const;
  const double* RowAt(std::int64_t i) const;
  double X(std::int64_t i) const;

  // Sorted indices i in [lo, hi) with |X_i| > c. Only innovations large
  // enough to push some |X_i| over c are turned into values, so the cost is
  // one hash per index when c is high.
  std::vector<std::int64_t> Exceedances(std::int64_t lo, std::int64_t hi, double c,
                                        int workers = 1) const;

 private:
  const RowTable* rows_;
  Stream innov_;
  Stream sign_;
  Stream mark_;
  double alpha_;
  double p_;
  const double* fixed_;  // row used at every index, or null
};

// Writes X_first .. X_{first+out.size()-1} of path `path_id`. Innovations,
// signs and marks at every index are pure functions of (seed, path_id,
// index), so any segment can be generated independently; the innovations
// before `first` play the role of burn-in.
void SimulateSegment(const RowTable& rows, std::uint64_t seed,
                     std::uint64_t path_id, std::int64_t first,
                     std::span<double> out, int workers = 1);

std::vector<double> SimulatePath(const RowTable& rows, std::uint64_t seed,
                                 std::uint64_t path_id, std::int64_t n,
                                 int workers = 1);

struct Threshold {
  double value = 0.0;
  // Relative standard error of P(|X_0| > value) implied by the pilot.
  double rel_sigma = 0.0;
  std::int64_t pilot_size = 0;
  bool extrapolated = false;
};

// c with P(|X_0| > c) = tail_prob, estimated from a pilot simulation with
// a fixed seed. The pilot has clamp(2e5 / tail_prob, 1e6, 2e7) values; when
// fewer than 5000 pilot values lie above c, the level of the 5000th largest
// value is extrapolated with the known tail index. Results are cached per
// model and probability.
Threshold CalibrateThreshold(const MAStencilModel& model, double tail_prob,
                             int workers = 1);

// Threshold for a configuration: the explicit value or the calibrated
// (1 - u_target / n) quantile.
Threshold ResolveThreshold(const MAStencilModel& model, const PathConfig& cfg);

struct Cluster {
  std::int64_t block = 0;
  std::int64_t anchor = 0;          // path index of the anchor
  std::int64_t exceedances = 0;
  double norm = 0.0;                // max |X| / c_n over the block
  int atom = -1;                    // nearest anchored atom, -1 if none
};

struct ClusterStats {
  std::int64_t n_blocks = 0;
  std::int64_t n_exceedances = 0;
  std::int64_t n_clusters = 0;
  std::vector<std::int64_t> atom_counts;   // per anchored atom
  std::map<std::int64_t, std::int64_t> size_histogram;
  std::vector<Cluster> clusters;

  void Merge(const ClusterStats& other);
};

// Splits x[0, k_n r_n) into blocks of r_n and records each block whose
// maximum exceeds c. The anchor is chosen within the block; the block,
// scaled by its maximum, is matched to the nearest atom of `q` over all
// alignments of a window of the given half width around the anchor.
ClusterStats ExtractClusters(std::span<const double> x, double c,
                             std::int64_t block_len, Anchor anchor,
                             const AtomicDist& q, int match_half_width,
                             bool keep_clusters = false);

// Same result for x = path[0, n), read through the exceedance scan.
ClusterStats ExtractClusters(const PathView& path, std::int64_t n, double c,
                             std::int64_t block_len, Anchor anchor,
                             const AtomicDist& q, int match_half_width,
                             bool keep_clusters = false, int workers = 1);

// Index of the atom of q nearest to the block around `anchor` in sup
// distance, trying every alignment; -1 if q is empty.
int NearestAtom(std::span<const double> block, std::int64_t anchor,
                double norm, const AtomicDist& q, int half_width);

}  // namespace tailproc

#endif  // TAILPROC_SIMULATE_HPP_
