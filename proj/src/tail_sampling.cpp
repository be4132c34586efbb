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

#include "tailproc/tail_sampling.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "tailproc/calculus.hpp"
#include "tailproc/error.hpp"
#include "tailproc/parallel.hpp"
#include "tailproc/rng.hpp"

namespace tailproc {
namespace {

constexpr std::int64_t kChunk = 1 << 16;
constexpr double kFamilyLevel = 0.0027;  // matches a single 3 sigma test

std::size_t ChunkCount(std::int64_t n) {
  return static_cast<std::size_t>((n + kChunk - 1) / kChunk);
}

std::int64_t ChunkLength(std::int64_t n, std::size_t chunk) {
  const std::int64_t begin = static_cast<std::int64_t>(chunk) * kChunk;
  return std::min(kChunk, n - begin);
}

void CheckOptions(const SamplingOptions& o) {
  if (o.n_samples <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "n_samples must be positive");
  }
  if (o.half_width < 0 || o.half_width > 31) {
    throw Error(ErrorCode::kInvalidArgument, "half width must be 0..31");
  }
}

void AddPatternCells(std::vector<Cell>& cells,
                     const std::map<Pattern, double>& exact,
                     const std::map<Pattern, std::int64_t>& observed,
                     double n, int half_width) {
  std::map<Pattern, double> keys = exact;
  for (const auto& [p, c] : observed) keys.emplace(p, 0.0);
  for (const auto& [p, prob] : keys) {
    auto it = observed.find(p);
    const double count = it == observed.end() ? 0.0 : static_cast<double>(it->second);
    cells.push_back({"pattern " + PatternDescription(p, half_width), count / n,
                     prob, BinomialSigma(prob, n)});
  }
}

void AddBucketCells(std::vector<Cell>& cells, const MagnitudeBuckets& buckets,
                    const std::vector<std::int64_t>& observed, double n) {
  for (int b = 0; b < buckets.size(); ++b) {
    const double p = buckets.ExactProbability(b);
    cells.push_back({buckets.Label(b),
                     static_cast<double>(observed[static_cast<std::size_t>(b)]) / n,
                     p, BinomialSigma(p, n)});
  }
}

}  // namespace

AtomSampler::AtomSampler(const AtomicDist& dist) {
  double acc = 0.0;
  for (const auto& a : dist.atoms()) {
    acc += a.weight;
    cumulative_.push_back(acc);
  }
}

std::size_t AtomSampler::Draw(double u) const {
  const double target = u * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()),
                               cumulative_.size() - 1);
}

double McReport::max_discrepancy() const {
  double m = 0.0;
  for (const auto& c : cells) m = std::max(m, std::abs(c.empirical - c.exact));
  return m;
}

double McReport::discrepancy_half_width() const {
  double m = 0.0;
  double worst = -1.0;
  for (const auto& c : cells) {
    const double gap = std::abs(c.empirical - c.exact);
    if (gap > worst) {
      worst = gap;
      m = critical_z * c.sigma;
    }
  }
  return m;
}

StationarityReport ExceedanceStationarityMc(const TailModel& model,
                                            const ExceedanceMap& tau,
                                            const SamplingOptions& options) {
  CheckTailModel(model);
  CheckOptions(options);
  const AtomSampler sampler(model.spectral);
  const MagnitudeBuckets buckets(model.alpha);
  const auto& atoms = model.spectral.atoms();

  struct Tally {
    std::map<Pattern, std::int64_t> patterns;
    std::vector<std::int64_t> buckets;
    std::int64_t moved = 0;
  };
  std::vector<Tally> tallies(ChunkCount(options.n_samples));
  ParallelFor(tallies.size(), options.workers, [&](std::size_t chunk) {
    const Stream atom_rng = Stream::Derive(options.seed, {kAtomStream, chunk});
    const Stream mag_rng = Stream::Derive(options.seed, {kMagnitudeStream, chunk});
    Tally& t = tallies[chunk];
    t.buckets.assign(static_cast<std::size_t>(buckets.size()), 0);
    const std::int64_t len = ChunkLength(options.n_samples, chunk);
    for (std::int64_t j = 0; j < len; ++j) {
      const auto& theta = atoms[sampler.Draw(atom_rng.Uniform(j))].seq;
      const LatticeSeq y = theta.Scaled(mag_rng.Pareto(j, model.alpha));
      const std::int64_t shift = tau(y);
      if (shift != 0) ++t.moved;
      const LatticeSeq moved = Shift(y, shift);
      ++t.patterns[PatternOf(moved, options.half_width)];
      ++t.buckets[static_cast<std::size_t>(buckets.Index(std::abs(moved[0])))];
    }
  });

  std::map<Pattern, std::int64_t> patterns;
  std::vector<std::int64_t> bucket_counts(static_cast<std::size_t>(buckets.size()), 0);
  std::int64_t moved = 0;
  for (const auto& t : tallies) {
    for (const auto& [p, c] : t.patterns) patterns[p] += c;
    for (std::size_t b = 0; b < bucket_counts.size(); ++b) bucket_counts[b] += t.buckets[b];
    moved += t.moved;
  }

  StationarityReport report;
  const double n = static_cast<double>(options.n_samples);
  report.n_samples = options.n_samples;
  AddPatternCells(report.cells, ExactPatternLaw(model, options.half_width),
                  patterns, n, options.half_width);
  AddBucketCells(report.cells, buckets, bucket_counts, n);
  report.critical_z = BonferroniCritical(kFamilyLevel, report.cells.size());
  report.moved_fraction = static_cast<double>(moved) / n;
  return report;
}

AnchoredSamplingReport AnchoredLawFromTailMc(const TailModel& model,
                                             Anchor anchor,
                                             const SamplingOptions& options) {
  CheckTailModel(model);
  CheckOptions(options);
  const AtomSampler sampler(model.spectral);
  const MagnitudeBuckets buckets(model.alpha);
  const AnchoredModel exact = AnchoredFromSpectral(model);
  const auto& q_atoms = exact.q.atoms();
  const auto& atoms = model.spectral.atoms();

  struct Tally {
    std::vector<std::int64_t> atom_counts;  // last slot: unmatched
    std::vector<std::int64_t> buckets;
    std::int64_t accepted = 0;
  };
  std::vector<Tally> tallies(ChunkCount(options.n_samples));
  ParallelFor(tallies.size(), options.workers, [&](std::size_t chunk) {
    const Stream atom_rng = Stream::Derive(options.seed, {kAtomStream, chunk});
    const Stream mag_rng = Stream::Derive(options.seed, {kMagnitudeStream, chunk});
    Tally& t = tallies[chunk];
    t.atom_counts.assign(q_atoms.size() + 1, 0);
    t.buckets.assign(static_cast<std::size_t>(buckets.size()), 0);
    const std::int64_t len = ChunkLength(options.n_samples, chunk);
    for (std::int64_t j = 0; j < len; ++j) {
      const auto& theta = atoms[sampler.Draw(atom_rng.Uniform(j))].seq;
      const LatticeSeq y = theta.Scaled(mag_rng.Pareto(j, model.alpha));
      if (AnchorOf(anchor, y) != 0) continue;
      ++t.accepted;
      const LatticeSeq canon = NormalizedCanonicalForm(y, 1e-9);
      std::size_t slot = q_atoms.size();
      for (std::size_t a = 0; a < q_atoms.size(); ++a) {
        if (ApproxEqual(canon, q_atoms[a].seq, 1e-9)) {
          slot = a;
          break;
        }
      }
      ++t.atom_counts[slot];
      ++t.buckets[static_cast<std::size_t>(buckets.Index(SupNorm(y)))];
    }
  });

  std::vector<std::int64_t> atom_counts(q_atoms.size() + 1, 0);
  std::vector<std::int64_t> bucket_counts(static_cast<std::size_t>(buckets.size()), 0);
  std::int64_t accepted = 0;
  for (const auto& t : tallies) {
    for (std::size_t a = 0; a < atom_counts.size(); ++a) atom_counts[a] += t.atom_counts[a];
    for (std::size_t b = 0; b < bucket_counts.size(); ++b) bucket_counts[b] += t.buckets[b];
    accepted += t.accepted;
  }
  if (accepted == 0) {
    throw Error(ErrorCode::kSamplingBudgetExceeded,
                "no sample had its anchor at the origin in " +
                    std::to_string(options.n_samples) + " draws");
  }

  AnchoredSamplingReport report;
  const double n = static_cast<double>(options.n_samples);
  const double m = static_cast<double>(accepted);
  report.n_samples = options.n_samples;
  report.accepted = accepted;
  report.exact_theta = ExtremalIndexSpectral(model);
  report.acceptance_rate = m / n;
  report.acceptance_sigma = BinomialSigma(report.exact_theta, n);
  report.cells.push_back({"acceptance rate", report.acceptance_rate,
                          report.exact_theta, report.acceptance_sigma});
  for (std::size_t a = 0; a < q_atoms.size(); ++a) {
    const double w = q_atoms[a].weight;
    report.cells.push_back({"atom " + q_atoms[a].seq.ToString(),
                            static_cast<double>(atom_counts[a]) / m, w,
                            BinomialSigma(w, m)});
  }
  report.cells.push_back({"atom <unmatched>",
                          static_cast<double>(atom_counts.back()) / m, 0.0, 0.0});
  AddBucketCells(report.cells, buckets, bucket_counts, m);
  report.critical_z = BonferroniCritical(kFamilyLevel, report.cells.size());
  return report;
}

SizeBiasedReport SizeBiasedTailFromAnchoredMc(const AnchoredModel& model,
                                              const SamplingOptions& options) {
  CheckAnchoredModel(model);
  CheckOptions(options);
  const AtomSampler sampler(model.q);
  const auto& atoms = model.q.atoms();

  struct PatternSums {
    double w = 0.0;   // sum of weights on the pattern
    double w2 = 0.0;  // sum of squared weights on the pattern
  };
  struct Tally {
    std::map<Pattern, PatternSums> patterns;
    double sw = 0.0, sw2 = 0.0, sw3 = 0.0, sw4 = 0.0;
  };
  std::vector<Tally> tallies(ChunkCount(options.n_samples));
  ParallelFor(tallies.size(), options.workers, [&](std::size_t chunk) {
    const Stream atom_rng = Stream::Derive(options.seed, {kAtomStream, chunk});
    const Stream mag_rng = Stream::Derive(options.seed, {kMagnitudeStream, chunk});
    const Stream pick_rng = Stream::Derive(options.seed, {kSelectStream, chunk});
    Tally& t = tallies[chunk];
    const std::int64_t len = ChunkLength(options.n_samples, chunk);
    for (std::int64_t j = 0; j < len; ++j) {
      const auto& q = atoms[sampler.Draw(atom_rng.Uniform(j))].seq;
      const LatticeSeq z = q.Scaled(mag_rng.Pareto(j, model.alpha));
      const ExceedanceSet e = ExceedanceSetOf(z);
      const double w = static_cast<double>(e.size());
      const auto pick = std::min<std::size_t>(
          e.size() - 1,
          static_cast<std::size_t>(pick_rng.Uniform(j) * static_cast<double>(e.size())));
      auto& cell = t.patterns[PatternOf(Shift(z, e.indices[pick]), options.half_width)];
      cell.w += w;
      cell.w2 += w * w;
      t.sw += w;
      t.sw2 += w * w;
      t.sw3 += w * w * w;
      t.sw4 += w * w * w * w;
    }
  });

  std::map<Pattern, PatternSums> patterns;
  double sw = 0.0, sw2 = 0.0, sw3 = 0.0, sw4 = 0.0;
  for (const auto& t : tallies) {
    for (const auto& [p, s] : t.patterns) {
      patterns[p].w += s.w;
      patterns[p].w2 += s.w2;
    }
    sw += t.sw;
    sw2 += t.sw2;
    sw3 += t.sw3;
    sw4 += t.sw4;
  }

  const TailModel tail = SpectralFromAnchored(model);
  std::map<Pattern, double> exact = ExactPatternLaw(tail, options.half_width);
  for (const auto& [p, s] : patterns) exact.emplace(p, 0.0);

  SizeBiasedReport report;
  report.n_samples = options.n_samples;
  for (const auto& [p, prob] : exact) {
    auto it = patterns.find(p);
    const PatternSums s = it == patterns.end() ? PatternSums{} : it->second;
    // Delta method for a ratio of weighted sums, centred at the target.
    const double var = (s.w2 * (1.0 - 2.0 * prob) + prob * prob * sw2) / (sw * sw);
    report.cells.push_back({"pattern " + PatternDescription(p, options.half_width),
                            s.w / sw, prob, std::sqrt(std::max(0.0, var))});
  }
  // With weight w = |e(Z)|, the tilted mean of |e| is sum w^2 / sum w.
  const double mean = sw2 / sw;
  const double var = (sw4 - 2.0 * mean * sw3 + mean * mean * sw2) / (sw * sw);
  report.mean_exceedances = mean;
  report.mean_exceedances_sigma = std::sqrt(std::max(0.0, var));
  report.exact_mean_exceedances = ExpectedExceedanceCount(tail);
  report.cells.push_back({"mean exceedance count", mean,
                          report.exact_mean_exceedances,
                          report.mean_exceedances_sigma});
  report.critical_z = BonferroniCritical(kFamilyLevel, report.cells.size());
  return report;
}

}  // namespace tailproc
