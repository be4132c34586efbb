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

#include "tailproc/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

#include "tailproc/error.hpp"
#include "tailproc/parallel.hpp"
#include "tailproc/rng.hpp"

namespace tailproc {
namespace {

template <typename T, typename F>
std::vector<T> MapPaths(std::int64_t paths, int workers, F&& f) {
  std::vector<T> out(static_cast<std::size_t>(paths));
  ParallelFor(out.size(), workers, [&](std::size_t i) { out[i] = f(i); });
  return out;
}

void CheckPaths(std::int64_t paths) {
  if (paths < 1) throw Error(ErrorCode::kInvalidArgument, "need at least one path");
}

// Pattern table against an exact law; patterns seen but impossible under the
// law are listed with exact probability 0.
std::vector<PatternEntry> PatternTable(const std::map<Pattern, double>& exact,
                                       const std::map<Pattern, std::int64_t>& counts,
                                       double total, int half_width) {
  std::map<Pattern, double> keys;
  for (const auto& [p, prob] : exact) {
    if (prob > 0.0) keys[p] = prob;
  }
  for (const auto& [p, c] : counts) keys.emplace(p, 0.0);
  std::vector<PatternEntry> rows;
  for (const auto& [p, prob] : keys) {
    auto it = counts.find(p);
    const double c = it == counts.end() ? 0.0 : static_cast<double>(it->second);
    rows.push_back({"p" + std::to_string(p), PatternDescription(p, half_width),
                    total > 0.0 ? c / total : 0.0, prob, BinomialSigma(prob, total)});
  }
  return rows;
}

std::vector<PatternEntry> AtomTable(const AtomicDist& q, const std::vector<std::int64_t>& counts,
                                    double total) {
  std::vector<PatternEntry> rows;
  for (std::size_t a = 0; a < q.size(); ++a) {
    const double w = q.atoms()[a].weight;
    rows.push_back({"q" + std::to_string(a), q.atoms()[a].seq.ToString(),
                    total > 0.0 ? static_cast<double>(counts[a]) / total : 0.0, w,
                    BinomialSigma(w, total)});
  }
  return rows;
}

std::map<Pattern, double> Frequencies(const std::map<Pattern, std::int64_t>& counts,
                                      double total) {
  std::map<Pattern, double> f;
  for (const auto& [p, c] : counts) f[p] = static_cast<double>(c) / total;
  return f;
}

// Exceedance pattern of [center - h, center + h] from the sorted exceedance
// list; indices outside [lo, hi) count as non-exceedances.
Pattern WindowPattern(const std::vector<std::int64_t>& exceed, std::int64_t center,
                      int half_width, std::int64_t lo, std::int64_t hi) {
  Pattern p = 0;
  auto it = std::lower_bound(exceed.begin(), exceed.end(),
                             std::max(lo, center - half_width));
  for (; it != exceed.end() && *it <= center + half_width && *it < hi; ++it) {
    p |= Pattern{1} << (*it - center + half_width);
  }
  return p;
}

std::size_t PickIndex(std::uint64_t seed, std::uint64_t path, std::size_t size) {
  const Stream pick = Stream::Derive(seed, {kSelectStream, path});
  return std::min<std::size_t>(size - 1,
                               static_cast<std::size_t>(pick.Uniform(0) * static_cast<double>(size)));
}

double Combine(double a, double b) { return std::sqrt(a * a + b * b); }

}  // namespace

TailProcessResult EmpiricalTailProcess(const MAStencilModel& model, const PathConfig& cfg) {
  cfg.Check(model.window());
  TailProcessResult result;
  result.threshold = ResolveThreshold(model, cfg);
  const double c = result.threshold.value;
  const RowTable rows(model);
  const PathView path(rows, cfg.seed, 0);
  const std::vector<std::int64_t> exceed = path.Exceedances(0, cfg.n, c, cfg.workers);

  const int h = cfg.half_width;
  const std::int64_t margin = std::max<std::int64_t>(h, model.window());
  const MagnitudeBuckets buckets(model.innovation.alpha, 8);
  std::map<Pattern, std::int64_t> patterns;
  std::vector<std::int64_t> mags(static_cast<std::size_t>(buckets.size()), 0);
  for (std::int64_t i : exceed) {
    if (i < margin || i >= cfg.n - margin) continue;
    ++result.n_exceedances;
    ++patterns[WindowPattern(exceed, i, h, 0, cfg.n)];
    ++mags[static_cast<std::size_t>(buckets.Index(std::abs(path.X(i)) / c))];
  }
  if (result.n_exceedances == 0) {
    throw Error(ErrorCode::kNoExceedances, "no value above the threshold " + FormatDouble(c));
  }
  const double total = static_cast<double>(result.n_exceedances);
  result.patterns = PatternTable(ExactPatternLaw(MaSpectral(model), h), patterns, total, h);
  for (int b = 0; b < buckets.size(); ++b) {
    const double p = buckets.ExactProbability(b);
    result.magnitudes.push_back({"m" + std::to_string(b), buckets.Label(b),
                                 static_cast<double>(mags[static_cast<std::size_t>(b)]) / total,
                                 p, BinomialSigma(p, total)});
  }
  return result;
}

ClusterResult ExtractClusterExperiment(const MAStencilModel& model, const PathConfig& cfg,
                                       Anchor anchor, std::int64_t paths) {
  cfg.Check(model.window());
  CheckPaths(paths);
  ClusterResult result;
  result.threshold = ResolveThreshold(model, cfg);
  result.block_len = cfg.BlockLength();
  const RowTable rows(model);
  const AnchoredModel q = MaAnchored(model);
  for (std::int64_t path = 0; path < paths; ++path) {
    const PathView view(rows, cfg.seed, static_cast<std::uint64_t>(path));
    result.stats.Merge(ExtractClusters(view, cfg.n, result.threshold.value, result.block_len,
                                       anchor, q.q, std::max(1, model.window() - 1), false,
                                       cfg.workers));
  }
  const ClusterStats& s = result.stats;
  if (s.n_clusters == 0) throw Error(ErrorCode::kNoClusters, "no block exceeds the threshold");

  const double nc = static_cast<double>(s.n_clusters);
  const double ne = static_cast<double>(s.n_exceedances);
  result.atoms = AtomTable(q.q, s.atom_counts, nc);
  result.theta_exact = MaExtremalIndex(model);
  result.theta_ratio = nc / ne;
  // Delta method on 1 / (mean cluster size).
  const double mean_size = ne / nc;
  double var_size = 0.0;
  for (const auto& [size, count] : s.size_histogram) {
    const double d = static_cast<double>(size) - mean_size;
    var_size += static_cast<double>(count) * d * d;
  }
  var_size /= nc;
  result.theta_ratio_sigma = std::sqrt(var_size / nc) / (mean_size * mean_size);

  const double retained = static_cast<double>(s.n_blocks * result.block_len);
  const double expected = cfg.u_target * retained / static_cast<double>(cfg.n);
  result.theta_clusters = nc / expected;
  result.theta_clusters_sigma =
      Combine(std::sqrt(nc) / expected, result.theta_clusters * result.threshold.rel_sigma);
  return result;
}

PoissonResult PoissonClusterExperiment(const MAStencilModel& model, const PathConfig& cfg,
                                       double eps, std::int64_t replicates) {
  cfg.Check(model.window());
  CheckPaths(replicates);
  if (!(eps > 0.0)) throw Error(ErrorCode::kInvalidArgument, "eps must be positive");
  PoissonResult result;
  result.threshold = ResolveThreshold(model, cfg);
  result.replicates = replicates;
  result.eps = eps;
  const double level = eps * result.threshold.value;
  const std::int64_t r = cfg.BlockLength();
  const std::int64_t k_n = cfg.n / r;
  const RowTable rows(model);

  const auto counts = MapPaths<std::int64_t>(replicates, cfg.workers, [&](std::size_t path) {
    const PathView view(rows, cfg.seed, path);
    std::int64_t exceeding = 0;
    std::int64_t last_block = -1;
    for (std::int64_t i : view.Exceedances(0, k_n * r, level)) {
      if (i / r != last_block) {
        ++exceeding;
        last_block = i / r;
      }
    }
    return exceeding;
  });

  std::map<std::int64_t, std::int64_t> histogram;
  double sum = 0.0;
  double sum2 = 0.0;
  for (std::int64_t k : counts) {
    ++histogram[k];
    sum += static_cast<double>(k);
    sum2 += static_cast<double>(k) * static_cast<double>(k);
  }
  const double reps = static_cast<double>(replicates);
  const double retained = static_cast<double>(k_n * r) / static_cast<double>(cfg.n);
  result.lambda = MaExtremalIndex(model) * cfg.u_target * retained *
                  std::pow(eps, -model.innovation.alpha);
  result.mean = sum / reps;
  result.variance = replicates > 1 ? (sum2 - reps * result.mean * result.mean) / (reps - 1.0) : 0.0;
  result.mean_sigma = Combine(std::sqrt(result.lambda / reps),
                              result.lambda * result.threshold.rel_sigma);
  result.dispersion = result.mean > 0.0 ? result.variance / result.mean : 0.0;
  result.dispersion_sigma =
      std::sqrt((result.lambda + 2.0 * result.lambda * result.lambda) / reps) / result.lambda;
  result.chi_square = PoissonChiSquare(histogram, result.lambda);
  const std::int64_t max_count = histogram.rbegin()->first;
  for (std::int64_t k = 0; k <= max_count; ++k) {
    auto it = histogram.find(k);
    result.rows.push_back(
        {k, it == histogram.end() ? 0.0 : static_cast<double>(it->second) / reps,
         PoissonPmf(k, result.lambda)});
  }
  return result;
}

RandomizedResult RandomizedOriginExperiment(const MAStencilModel& model, const PathConfig& cfg,
                                            std::int64_t paths) {
  cfg.Check(model.window());
  CheckPaths(paths);
  RandomizedResult result;
  result.threshold = ResolveThreshold(model, cfg);
  result.paths = paths;
  const double c = result.threshold.value;
  const std::int64_t r = cfg.BlockLength();
  const std::int64_t retained = (cfg.n / r) * r;
  const int h = cfg.half_width;
  const RowTable rows(model);

  const auto picks = MapPaths<std::optional<Pattern>>(paths, cfg.workers, [&](std::size_t path) {
    const PathView view(rows, cfg.seed, path);
    const std::vector<std::int64_t> exceed = view.Exceedances(0, retained, c);
    if (exceed.empty()) return std::optional<Pattern>();
    const std::int64_t t = exceed[PickIndex(cfg.seed, path, exceed.size())];
    const std::int64_t start = (t / r) * r;
    return std::optional<Pattern>(WindowPattern(exceed, t, h, start, start + r));
  });

  std::map<Pattern, std::int64_t> counts;
  for (const auto& p : picks) {
    if (!p) continue;
    ++counts[*p];
    ++result.samples;
  }
  if (result.samples == 0) throw Error(ErrorCode::kNoExceedances, "no path had an exceedance");
  const double total = static_cast<double>(result.samples);
  const auto limit = ExactPatternLaw(RandomizedOriginLimit(model), h);
  const auto tail = ExactPatternLaw(MaSpectral(model), h);
  result.patterns = PatternTable(limit, counts, total, h);
  const auto freq = Frequencies(counts, total);
  result.tv_to_limit = TotalVariation(freq, limit);
  result.tv_to_tail = TotalVariation(freq, tail);
  return result;
}

RandomizedResult RandomizedClusterExperiment(const MAStencilModel& model, const PathConfig& cfg,
                                             Anchor anchor, std::int64_t paths) {
  cfg.Check(model.window());
  CheckPaths(paths);
  RandomizedResult result;
  result.threshold = ResolveThreshold(model, cfg);
  result.paths = paths;
  const std::int64_t r = cfg.BlockLength();
  const RowTable rows(model);
  const AnchoredModel q = MaAnchored(model);
  const int match = std::max(1, model.window() - 1);

  const auto picks = MapPaths<int>(paths, cfg.workers, [&](std::size_t path) {
    const PathView view(rows, cfg.seed, path);
    const ClusterStats s =
        ExtractClusters(view, cfg.n, result.threshold.value, r, anchor, q.q, match, true);
    if (s.clusters.empty()) return -1;
    return s.clusters[PickIndex(cfg.seed, path, s.clusters.size())].atom;
  });

  std::vector<std::int64_t> counts(q.q.size(), 0);
  for (int a : picks) {
    if (a < 0) continue;
    ++counts[static_cast<std::size_t>(a)];
    ++result.samples;
  }
  if (result.samples == 0) throw Error(ErrorCode::kNoClusters, "no path had a cluster");
  const double total = static_cast<double>(result.samples);
  result.patterns = AtomTable(q.q, counts, total);
  double tv = 0.0;
  for (const auto& row : result.patterns) tv += std::abs(row.empirical - row.exact);
  result.tv_to_limit = result.tv_to_tail = 0.5 * tv;
  return result;
}

CampbellFunctional ParseCampbellFunctional(const std::string& name) {
  if (name == "one") return CampbellFunctional::kOne;
  if (name == "t-origin") return CampbellFunctional::kTimeAtOrigin;
  if (name == "next-exceeds") return CampbellFunctional::kNextExceeds;
  throw Error(ErrorCode::kConfigError,
              "unknown functional '" + name + "' (one, t-origin, next-exceeds)");
}

std::string CampbellFunctionalName(CampbellFunctional f) {
  switch (f) {
    case CampbellFunctional::kOne: return "one";
    case CampbellFunctional::kTimeAtOrigin: return "t-origin";
    case CampbellFunctional::kNextExceeds: return "next-exceeds";
  }
  return "?";
}

CampbellResult CampbellCheck(const MAStencilModel& model, const PathConfig& cfg,
                             CampbellFunctional f, std::int64_t paths) {
  cfg.Check(model.window());
  CheckPaths(paths);
  CampbellResult result;
  result.threshold = ResolveThreshold(model, cfg);
  result.functional = CampbellFunctionalName(f);
  result.paths = paths;
  const double c = result.threshold.value;
  const double n = static_cast<double>(cfg.n);
  const RowTable rows(model);

  const auto sums = MapPaths<double>(paths, cfg.workers, [&](std::size_t path) {
    // One extra index so the last one has a right neighbour.
    const PathView view(rows, cfg.seed, path);
    const std::vector<std::int64_t> exceed = view.Exceedances(0, cfg.n + 1, c);
    double s = 0.0;
    for (std::size_t e = 0; e < exceed.size(); ++e) {
      const std::int64_t k = exceed[e];
      if (k >= cfg.n) break;
      switch (f) {
        case CampbellFunctional::kOne: s += 1.0; break;
        case CampbellFunctional::kTimeAtOrigin: s += (static_cast<double>(k) + 0.5) / n; break;
        case CampbellFunctional::kNextExceeds:
          s += e + 1 < exceed.size() && exceed[e + 1] == k + 1 ? 1.0 : 0.0;
          break;
      }
    }
    return s;
  });

  double sum = 0.0;
  double sum2 = 0.0;
  for (double s : sums) {
    sum += s;
    sum2 += s * s;
  }
  const double m = static_cast<double>(paths);
  result.lhs = sum / m;
  const double var = paths > 1 ? (sum2 - m * result.lhs * result.lhs) / (m - 1.0) : 0.0;
  switch (f) {
    case CampbellFunctional::kOne: result.rhs = cfg.u_target; break;
    case CampbellFunctional::kTimeAtOrigin: result.rhs = cfg.u_target / 2.0; break;
    case CampbellFunctional::kNextExceeds:
      result.rhs = cfg.u_target * ExceedanceProbabilityAt(MaSpectral(model), 1);
      break;
  }
  result.lhs_sigma =
      Combine(std::sqrt(std::max(0.0, var) / m), result.rhs * result.threshold.rel_sigma);
  return result;
}

std::vector<EstimatorRow> EstimatorConvergence(const MAStencilModel& model,
                                               const PathConfig& base,
                                               const std::vector<std::int64_t>& schedule) {
  const RowTable rows(model);
  const AnchoredModel q = MaAnchored(model);
  const double theta = MaExtremalIndex(model);
  std::vector<EstimatorRow> table;
  for (std::size_t s = 0; s < schedule.size(); ++s) {
    PathConfig cfg = base;
    cfg.n = schedule[s];
    cfg.Check(model.window());
    const Threshold th = ResolveThreshold(model, cfg);
    const std::int64_t r = cfg.BlockLength();
    const PathView view(rows, cfg.seed, s);
    const ClusterStats st = ExtractClusters(view, cfg.n, th.value, r, Anchor::kFirstMaximum, q.q,
                                            std::max(1, model.window() - 1), false, cfg.workers);
    EstimatorRow row;
    row.n = cfg.n;
    row.r_n = r;
    row.c_n = th.value;
    row.n_exceedances = st.n_exceedances;
    row.n_clusters = st.n_clusters;
    row.theta_hat = st.n_exceedances > 0
                        ? static_cast<double>(st.n_clusters) / static_cast<double>(st.n_exceedances)
                        : 0.0;
    row.theta_exact = theta;
    const double retained = static_cast<double>(st.n_blocks * r) / static_cast<double>(cfg.n);
    row.exceedance_ratio = static_cast<double>(st.n_exceedances) / (cfg.u_target * retained);
    row.cluster_ratio = static_cast<double>(st.n_clusters) / (theta * cfg.u_target * retained);
    table.push_back(row);
  }
  return table;
}

}  // namespace tailproc
