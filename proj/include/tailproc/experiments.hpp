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

// Simulation experiments comparing simulated moving averages with their
// exact tail, cluster and Poisson limits.

#ifndef TAILPROC_EXPERIMENTS_HPP_
#define TAILPROC_EXPERIMENTS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "tailproc/calculus.hpp"
#include "tailproc/models.hpp"
#include "tailproc/simulate.hpp"
#include "tailproc/stats.hpp"

namespace tailproc {

// One row of a pattern table.
struct PatternEntry {
  std::string id;
  std::string description;
  double empirical = 0.0;
  double exact = 0.0;
  double sigma = 0.0;

  double z() const { return Cell{description, empirical, exact, sigma}.z(); }
};

struct TailProcessResult {
  Threshold threshold;
  std::int64_t n_exceedances = 0;
  std::vector<PatternEntry> patterns;
  std::vector<PatternEntry> magnitudes;  // |X_0| / c_n against Pareto
};

// Windows X_{i-h..i+h} / c_n around every exceedance of one path, away from
// the edges, against the exact tail law. Throws kNoExceedances.
TailProcessResult EmpiricalTailProcess(const MAStencilModel& model, const PathConfig& cfg);

struct ClusterResult {
  Threshold threshold;
  std::int64_t block_len = 0;
  ClusterStats stats;
  std::vector<PatternEntry> atoms;  // anchored atoms against the exact law
  double theta_exact = 0.0;
  double theta_ratio = 0.0;  // N_c / N_e
  double theta_ratio_sigma = 0.0;
  double theta_clusters = 0.0;  // N_c / (k_n r_n P(|X_0| > c_n))
  double theta_clusters_sigma = 0.0;
};

// Block clusters of `paths` independent paths, anchored and matched to the
// exact anchored law. Throws kNoClusters.
ClusterResult ExtractClusterExperiment(const MAStencilModel& model, const PathConfig& cfg,
                                       Anchor anchor, std::int64_t paths = 1);

struct PoissonRow {
  std::int64_t count = 0;
  double empirical_freq = 0.0;
  double poisson_pmf = 0.0;
};

struct PoissonResult {
  Threshold threshold;
  std::int64_t replicates = 0;
  double eps = 1.0;
  double lambda = 0.0;  // theta * u_target * eps^-alpha
  double mean = 0.0;
  double mean_sigma = 0.0;
  double variance = 0.0;
  double dispersion = 0.0;        // variance / mean
  double dispersion_sigma = 0.0;  // under the Poisson limit
  ChiSquareResult chi_square;
  std::vector<PoissonRow> rows;
};

// Number of blocks whose maximum exceeds eps * c_n, over independent paths.
PoissonResult PoissonClusterExperiment(const MAStencilModel& model, const PathConfig& cfg,
                                       double eps, std::int64_t replicates);

struct RandomizedResult {
  Threshold threshold;
  std::int64_t paths = 0;
  std::int64_t samples = 0;  // paths that contributed
  std::vector<PatternEntry> patterns;
  double tv_to_limit = 0.0;
  double tv_to_tail = 0.0;  // against the tail process pattern law
};

// One uniformly chosen exceedance per path; the window around it is read
// within its block only. Compared with RandomizedOriginLimit. Throws
// kNoExceedances.
RandomizedResult RandomizedOriginExperiment(const MAStencilModel& model, const PathConfig& cfg,
                                            std::int64_t paths);

// One uniformly chosen exceeding block per path, anchored and matched to the
// exact anchored law. Throws kNoClusters.
RandomizedResult RandomizedClusterExperiment(const MAStencilModel& model, const PathConfig& cfg,
                                             Anchor anchor, std::int64_t paths);

enum class CampbellFunctional {
  kOne,           // f = 1
  kTimeAtOrigin,  // f(t, y) = t * 1{|y_0| > 1}
  kNextExceeds,   // f(t, y) = 1{|y_1| > 1}
};

CampbellFunctional ParseCampbellFunctional(const std::string& name);
std::string CampbellFunctionalName(CampbellFunctional f);

struct CampbellResult {
  Threshold threshold;
  std::string functional;
  std::int64_t paths = 0;
  double lhs = 0.0;
  double lhs_sigma = 0.0;  // Monte-Carlo and calibration error combined
  double rhs = 0.0;
};

// Average over paths of sum_k f((k + 1/2) / n, X_{k+.} / c_n) 1{|X_k| > c_n}
// against u_target * int_0^1 E f(t, Y) dt.
CampbellResult CampbellCheck(const MAStencilModel& model, const PathConfig& cfg,
                             CampbellFunctional f, std::int64_t paths);

struct EstimatorRow {
  std::int64_t n = 0;
  std::int64_t r_n = 0;
  double c_n = 0.0;
  std::int64_t n_exceedances = 0;
  std::int64_t n_clusters = 0;
  double theta_hat = 0.0;
  double theta_exact = 0.0;
  double exceedance_ratio = 0.0;  // N_e / (n P(|X_0| > c_n))
  double cluster_ratio = 0.0;     // N_c / (theta k_n r_n P(|X_0| > c_n))
};

// One path per n, clusters anchored at the first maximum.
std::vector<EstimatorRow> EstimatorConvergence(const MAStencilModel& model,
                                               const PathConfig& base,
                                               const std::vector<std::int64_t>& schedule);

}  // namespace tailproc

#endif  // TAILPROC_EXPERIMENTS_HPP_
