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

#include <algorithm>
#include <cmath>
#include <functional>
#include <mutex>
#include <queue>

#include "tailproc/error.hpp"
#include "tailproc/parallel.hpp"
#include "tailproc/rng.hpp"

namespace tailproc {
namespace {

constexpr std::int64_t kSegment = 1 << 16;
constexpr std::uint64_t kPilotSeed = 0x70696c6f74ULL;
constexpr std::int64_t kPilotPathLength = 1'000'000;
constexpr std::int64_t kTailOrder = 5000;

std::uint64_t Counter(std::int64_t index) {
  return static_cast<std::uint64_t>(index);
}

void SimulateChunk(const RowTable& rows, std::uint64_t seed, std::uint64_t path_id,
                   std::int64_t first, std::span<double> out) {
  const PathView view(rows, seed, path_id);
  const int m = rows.window();
  // z[t] holds Z_{first - (m - 1) + t}.
  const auto len = static_cast<std::int64_t>(out.size());
  std::vector<double> z(static_cast<std::size_t>(len + m - 1));
  const std::int64_t z0 = first - (m - 1);
  for (std::size_t t = 0; t < z.size(); ++t) z[t] = view.Z(z0 + static_cast<std::int64_t>(t));
  for (std::int64_t i = 0; i < len; ++i) {
    const double* c = view.RowAt(first + i);
    // X_i = sum_k C_k Z_{i-k}; Z_i sits at z[i + m - 1].
    const double* zi = &z[static_cast<std::size_t>(i + m - 1)];
    double x = 0.0;
    for (int k = 0; k < m; ++k) x += c[k] * zi[-k];
    out[static_cast<std::size_t>(i)] = x;
  }
}

// Keeps the `keep` largest values seen.
class TopK {
 public:
  explicit TopK(std::size_t keep) : keep_(keep) {}
  void Push(double v) {
    if (heap_.size() < keep_) {
      heap_.push(v);
    } else if (v > heap_.top()) {
      heap_.pop();
      heap_.push(v);
    }
  }
  std::vector<double> Take() {
    std::vector<double> out;
    out.reserve(heap_.size());
    while (!heap_.empty()) {
      out.push_back(heap_.top());
      heap_.pop();
    }
    return out;
  }

 private:
  std::size_t keep_;
  std::priority_queue<double, std::vector<double>, std::greater<double>> heap_;
};

}  // namespace

std::int64_t PathConfig::BlockLength() const {
  if (block_len > 0) return block_len;
  return std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::floor(std::pow(static_cast<double>(n), r_exponent))));
}

void PathConfig::Check(int stencil_window) const {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "n must be positive");
  if (!(r_exponent > 0.0 && r_exponent < 1.0) && block_len <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "r exponent must lie in (0, 1)");
  }
  const std::int64_t r = BlockLength();
  if (r > n) throw Error(ErrorCode::kInvalidArgument, "block length exceeds n");
  if (r < 2 * static_cast<std::int64_t>(stencil_window - 1) + 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "block length " + std::to_string(r) + " is shorter than 2m+1");
  }
  if (threshold) {
    if (!(*threshold > 0.0)) throw Error(ErrorCode::kInvalidArgument, "threshold must be positive");
  } else if (!(u_target > 0.0) || u_target >= static_cast<double>(n)) {
    throw Error(ErrorCode::kInvalidArgument, "u_target must lie in (0, n)");
  }
  if (half_width < 0 || half_width > 31) {
    throw Error(ErrorCode::kInvalidArgument, "window half width must be 0..31");
  }
  if (workers < 1) throw Error(ErrorCode::kInvalidArgument, "workers must be >= 1");
}

RowTable::RowTable(const MAStencilModel& model)
    : model_(&model), window_(model.window()) {
  double acc = 0.0;
  for (const auto& row : EnumerateRows(model)) {
    coef_.insert(coef_.end(), row.coef.begin(), row.coef.end());
    acc += row.prob;
    probs_cum_.push_back(acc);
    double sum = 0.0;
    for (double v : row.coef) sum += std::abs(v);
    max_abs_row_sum_ = std::max(max_abs_row_sum_, sum);
  }
}

PathView::PathView(const RowTable& rows, std::uint64_t seed, std::uint64_t path_id)
    : rows_(&rows),
      innov_(Stream::Derive(seed, {kInnovationStream, path_id})),
      sign_(Stream::Derive(seed, {kSignStream, path_id})),
      mark_(Stream::Derive(seed, {kMarkStream, path_id})),
      alpha_(rows.model().innovation.alpha),
      p_(rows.model().innovation.p),
      fixed_(nullptr) {
  if (rows.size() == 1) {
    fixed_ = rows.Row(0);
  } else if (rows.model().sharing == MarkSharing::kGlobal) {
    fixed_ = rows.Row(rows.Draw(mark_.Uniform(0)));
  }
}

double PathView::Z(std::int64_t j) const {
  double v = innov_.Pareto(Counter(j), alpha_);
  if (p_ < 1.0 && (p_ == 0.0 || sign_.Uniform(Counter(j)) >= p_)) v = -v;
  return v;
}

const double* PathView::RowAt(std::int64_t i) const {
  return fixed_ ? fixed_ : rows_->Row(rows_->Draw(mark_.Uniform(Counter(i) + 1)));
}

double PathView::X(std::int64_t i) const {
  const double* c = RowAt(i);
  double x = 0.0;
  for (int k = 0; k < rows_->window(); ++k) x += c[k] * Z(i - k);
  return x;
}

std::vector<std::int64_t> PathView::Exceedances(std::int64_t lo, std::int64_t hi, double c,
                                                int workers) const {
  if (hi <= lo) return {};
  const int m = rows_->window();
  const double w = rows_->MaxAbsRowSum();
  // |X_i| > c needs some |Z_{i-k}| > c / w, i.e. a uniform below cut. The
  // cut is loosened slightly; candidates are checked exactly.
  const double level = w > 0.0 ? c / w : INFINITY;
  const double cut = level > 1.0 ? std::pow(level, -alpha_) * (1.0 + 1e-9) : 2.0;
  // Uniform(j) < cut is implied by Bits(j) < bits_cut.
  const std::uint64_t bits_cut =
      cut >= 1.0 ? ~std::uint64_t{0} : static_cast<std::uint64_t>(std::ldexp(cut, 64)) + 4096;
  const std::int64_t len = hi - lo;
  const auto chunks = static_cast<std::size_t>((len + kSegment - 1) / kSegment);
  std::vector<std::vector<std::int64_t>> parts(chunks);
  ParallelFor(chunks, workers, [&](std::size_t part) {
    const std::int64_t a = lo + static_cast<std::int64_t>(part) * kSegment;
    const std::int64_t b = std::min(hi, a + kSegment);
    auto& out = parts[part];
    const Stream innov = innov_;
    const std::uint64_t limit = bits_cut;
    std::int64_t next = a;  // first index not yet examined
    for (std::int64_t j = a - (m - 1); j < b; ++j) {
      while (j < b && innov.Bits(Counter(j)) >= limit) ++j;
      if (j == b) break;
      for (std::int64_t t = std::max(j, next); t < std::min(j + m, b); ++t) {
        if (std::abs(X(t)) > c) out.push_back(t);
      }
      next = std::max(next, j + m);
    }
  });
  std::vector<std::int64_t> all;
  for (const auto& part : parts) all.insert(all.end(), part.begin(), part.end());
  return all;
}

std::size_t RowTable::Draw(double u) const {
  const double target = u * probs_cum_.back();
  auto it = std::upper_bound(probs_cum_.begin(), probs_cum_.end(), target);
  return std::min<std::size_t>(static_cast<std::size_t>(it - probs_cum_.begin()),
                               probs_cum_.size() - 1);
}

void SimulateSegment(const RowTable& rows, std::uint64_t seed,
                     std::uint64_t path_id, std::int64_t first,
                     std::span<double> out, int workers) {
  const auto len = static_cast<std::int64_t>(out.size());
  const auto chunks = static_cast<std::size_t>((len + kSegment - 1) / kSegment);
  ParallelFor(chunks, workers, [&](std::size_t c) {
    const std::int64_t begin = static_cast<std::int64_t>(c) * kSegment;
    const std::int64_t count = std::min(kSegment, len - begin);
    SimulateChunk(rows, seed, path_id, first + begin,
                  out.subspan(static_cast<std::size_t>(begin), static_cast<std::size_t>(count)));
  });
}

std::vector<double> SimulatePath(const RowTable& rows, std::uint64_t seed,
                                 std::uint64_t path_id, std::int64_t n, int workers) {
  std::vector<double> x(static_cast<std::size_t>(n));
  SimulateSegment(rows, seed, path_id, 0, x, workers);
  return x;
}

Threshold CalibrateThreshold(const MAStencilModel& model, double tail_prob, int workers) {
  if (!(tail_prob > 0.0 && tail_prob < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "tail probability must lie in (0, 1)");
  }
  static std::mutex mu;
  static std::map<std::pair<std::string, double>, Threshold> cache;
  const auto key = std::make_pair(ModelFingerprint(model), tail_prob);
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }

  const auto pilot = static_cast<std::int64_t>(
      std::clamp(2e5 / tail_prob, 1e6, 2e7));
  const double expected_above = static_cast<double>(pilot) * tail_prob;
  const bool direct = expected_above >= static_cast<double>(kTailOrder);
  const std::int64_t order =
      direct ? static_cast<std::int64_t>(std::llround(expected_above)) : kTailOrder;
  const auto keep = static_cast<std::size_t>(order + 1);

  const RowTable rows(model);
  const auto paths = static_cast<std::size_t>((pilot + kPilotPathLength - 1) / kPilotPathLength);
  std::vector<std::vector<double>> tops(paths);
  ParallelFor(paths, workers, [&](std::size_t path) {
    const std::int64_t begin = static_cast<std::int64_t>(path) * kPilotPathLength;
    const std::int64_t len = std::min(kPilotPathLength, pilot - begin);
    std::vector<double> x(static_cast<std::size_t>(len));
    SimulateSegment(rows, kPilotSeed, path, 0, x, 1);
    TopK top(keep);
    for (double v : x) top.Push(std::abs(v));
    tops[path] = top.Take();
  });
  std::vector<double> all;
  for (const auto& t : tops) all.insert(all.end(), t.begin(), t.end());
  std::sort(all.begin(), all.end(), std::greater<double>());

  Threshold th;
  th.pilot_size = pilot;
  const double level = all[static_cast<std::size_t>(order)];
  if (direct) {
    th.value = level;
  } else {
    // P(|X| > level) ~ order / pilot; scale down to tail_prob along the
    // power law of index alpha.
    th.value = level * std::pow(static_cast<double>(order) / expected_above,
                                1.0 / model.innovation.alpha);
    th.extrapolated = true;
  }
  th.rel_sigma = 1.0 / std::sqrt(static_cast<double>(order));
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(key, th);
  return th;
}

Threshold ResolveThreshold(const MAStencilModel& model, const PathConfig& cfg) {
  if (cfg.threshold) return Threshold{*cfg.threshold, 0.0, 0, false};
  return CalibrateThreshold(model, cfg.u_target / static_cast<double>(cfg.n), cfg.workers);
}

void ClusterStats::Merge(const ClusterStats& other) {
  n_blocks += other.n_blocks;
  n_exceedances += other.n_exceedances;
  n_clusters += other.n_clusters;
  if (atom_counts.size() < other.atom_counts.size()) {
    atom_counts.resize(other.atom_counts.size(), 0);
  }
  for (std::size_t a = 0; a < other.atom_counts.size(); ++a) atom_counts[a] += other.atom_counts[a];
  for (const auto& [size, count] : other.size_histogram) size_histogram[size] += count;
  clusters.insert(clusters.end(), other.clusters.begin(), other.clusters.end());
}

int NearestAtom(std::span<const double> block, std::int64_t anchor, double norm,
                const AtomicDist& q, int half_width) {
  const int reach = 2 * half_width;
  auto local = [&](std::int64_t j) {
    const std::int64_t i = anchor + j;
    if (i < 0 || i >= static_cast<std::int64_t>(block.size())) return 0.0;
    return block[static_cast<std::size_t>(i)] / norm;
  };
  int best = -1;
  double best_dist = INFINITY;
  for (std::size_t a = 0; a < q.atoms().size(); ++a) {
    const LatticeSeq& atom = q.atoms()[a].seq;
    for (int s = -half_width; s <= half_width; ++s) {
      // Compare local_j with atom_{j+s}.
      double dist = 0.0;
      for (int j = -reach; j <= reach; ++j) dist = std::max(dist, std::abs(local(j) - atom[j + s]));
      for (const auto& e : atom.entries()) {
        const std::int64_t j = e.index - s;
        if (j < -reach || j > reach) dist = std::max(dist, std::abs(e.value));
      }
      if (dist < best_dist) {
        best_dist = dist;
        best = static_cast<int>(a);
      }
    }
  }
  return best;
}

ClusterStats ExtractClusters(std::span<const double> x, double c, std::int64_t block_len,
                             Anchor anchor, const AtomicDist& q, int match_half_width,
                             bool keep_clusters) {
  ClusterStats stats;
  stats.atom_counts.assign(q.size(), 0);
  const auto n = static_cast<std::int64_t>(x.size());
  stats.n_blocks = n / block_len;
  for (std::int64_t b = 0; b < stats.n_blocks; ++b) {
    const auto block = x.subspan(static_cast<std::size_t>(b * block_len),
                                 static_cast<std::size_t>(block_len));
    std::int64_t first_exceed = -1;
    std::int64_t first_max = 0;
    double max_abs = 0.0;
    std::int64_t count = 0;
    for (std::int64_t i = 0; i < block_len; ++i) {
      const double v = std::abs(block[static_cast<std::size_t>(i)]);
      if (v > c) {
        ++count;
        if (first_exceed < 0) first_exceed = i;
      }
      if (v > max_abs) {
        max_abs = v;
        first_max = i;
      }
    }
    if (count == 0) continue;
    const std::int64_t a = anchor == Anchor::kFirstExceedance ? first_exceed : first_max;
    Cluster cl{b, b * block_len + a, count, max_abs / c, -1};
    if (q.size() > 0) {
      cl.atom = NearestAtom(block, a, max_abs, q, match_half_width);
      ++stats.atom_counts[static_cast<std::size_t>(cl.atom)];
    }
    ++stats.n_clusters;
    stats.n_exceedances += count;
    ++stats.size_histogram[count];
    if (keep_clusters) stats.clusters.push_back(cl);
  }
  return stats;
}

ClusterStats ExtractClusters(const PathView& path, std::int64_t n, double c,
                             std::int64_t block_len, Anchor anchor, const AtomicDist& q,
                             int match_half_width, bool keep_clusters, int workers) {
  ClusterStats stats;
  stats.atom_counts.assign(q.size(), 0);
  stats.n_blocks = n / block_len;
  const std::int64_t end = stats.n_blocks * block_len;
  const std::vector<std::int64_t> ex = path.Exceedances(0, end, c, workers);
  const std::int64_t reach = 2 * match_half_width;
  std::vector<double> local;
  for (std::size_t k = 0; k < ex.size();) {
    const std::int64_t b = ex[k] / block_len;
    const std::int64_t start = b * block_len;
    std::size_t e = k;
    std::int64_t first_max = ex[k];
    double max_abs = 0.0;
    for (; e < ex.size() && ex[e] < start + block_len; ++e) {
      const double v = std::abs(path.X(ex[e]));
      if (v > max_abs) {
        max_abs = v;
        first_max = ex[e];
      }
    }
    const auto count = static_cast<std::int64_t>(e - k);
    const std::int64_t a = anchor == Anchor::kFirstExceedance ? ex[k] : first_max;
    Cluster cl{b, a, count, max_abs / c, -1};
    if (q.size() > 0) {
      // Values within reach of the anchor, clipped to the block.
      const std::int64_t from = std::max(start, a - reach);
      const std::int64_t to = std::min(start + block_len, a + reach + 1);
      local.resize(static_cast<std::size_t>(to - from));
      for (std::int64_t i = from; i < to; ++i) local[static_cast<std::size_t>(i - from)] = path.X(i);
      cl.atom = NearestAtom(local, a - from, max_abs, q, match_half_width);
      ++stats.atom_counts[static_cast<std::size_t>(cl.atom)];
    }
    ++stats.n_clusters;
    stats.n_exceedances += count;
    ++stats.size_histogram[count];
    if (keep_clusters) stats.clusters.push_back(cl);
    k = e;
  }
  return stats;
}

}  // namespace tailproc
