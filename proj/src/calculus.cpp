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

#include "tailproc/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tailproc/error.hpp"

namespace tailproc {
namespace {

// shift(x, k) / |x_k|, with the origin value exactly +-1.
LatticeSeq ShiftAndRescale(const LatticeSeq& x, std::int64_t k) {
  const double scale = std::abs(x[k]);
  std::vector<SeqEntry> out;
  out.reserve(x.support_size());
  for (const auto& e : x.entries()) {
    out.push_back({e.index - k, e.index == k ? std::copysign(1.0, e.value)
                                             : e.value / scale});
  }
  return LatticeSeq(std::move(out));
}

struct SignedAtom {
  std::int64_t lag;
  LatticeSeq seq;
  double mass;  // left side positive, right side negative
  bool left;
};

// Groups equal (lag, sequence) keys and returns the worst net mass.
TcfReport CompareSigned(std::vector<SignedAtom> atoms, double tol,
                        bool negate_lag) {
  std::stable_sort(atoms.begin(), atoms.end(),
                   [](const SignedAtom& a, const SignedAtom& b) {
                     if (a.lag != b.lag) return a.lag < b.lag;
                     return CompareApprox(a.seq, b.seq) < 0;
                   });
  TcfReport report;
  std::size_t i = 0;
  while (i < atoms.size()) {
    double left = 0.0;
    double right = 0.0;
    std::size_t j = i;
    while (j < atoms.size() && atoms[j].lag == atoms[i].lag &&
           ApproxEqual(atoms[j].seq, atoms[i].seq)) {
      (atoms[j].left ? left : right) += std::abs(atoms[j].mass);
      ++j;
    }
    const double diff = std::abs(left - right);
    if (diff > report.max_violation) {
      report.max_violation = diff;
      report.witness = TcfWitness{negate_lag ? -atoms[i].lag : atoms[i].lag,
                                  atoms[i].seq, left, right};
    }
    i = j;
  }
  report.valid = report.max_violation <= tol;
  if (report.valid) report.witness.reset();
  return report;
}

double Pow(double x, double alpha) { return std::pow(std::abs(x), alpha); }

}  // namespace

LatticeSeq NormalizedCanonicalForm(const LatticeSeq& x, double rel_tol) {
  const double sup = SupNorm(x);
  if (sup == 0.0) throw Error(ErrorCode::kZeroSequence, "canonical form of 0");
  std::int64_t anchor = 0;
  for (const auto& e : x.entries()) {
    if (std::abs(e.value) >= sup * (1.0 - rel_tol)) {
      anchor = e.index;
      break;
    }
  }
  std::vector<SeqEntry> out;
  out.reserve(x.support_size());
  for (const auto& e : x.entries()) {
    double v = e.value / sup;
    if (std::abs(std::abs(v) - 1.0) <= rel_tol) v = std::copysign(1.0, v);
    out.push_back({e.index - anchor, v});
  }
  return LatticeSeq(std::move(out));
}

std::int64_t MaxSupportRadius(const AtomicDist& dist) {
  std::int64_t r = 0;
  for (const auto& a : dist.atoms()) {
    if (a.seq.empty()) continue;
    r = std::max({r, std::abs(a.seq.min_index()), std::abs(a.seq.max_index())});
  }
  return r;
}

TcfReport TcfCheck(const TailModel& model, std::optional<std::int64_t> k_range,
                   double tol) {
  CheckTailModel(model);
  const std::int64_t radius = MaxSupportRadius(model.spectral);
  const std::int64_t k_max = k_range.value_or(radius);
  if (k_max < radius) {
    throw Error(ErrorCode::kInvalidArgument,
                "k_range " + std::to_string(k_max) +
                    " is below the support radius " + std::to_string(radius));
  }
  TcfReport worst;
  // Order 0, 1, -1, 2, -2, ... so ties report the smallest lag.
  for (std::int64_t step = 0; step <= 2 * k_max; ++step) {
    const std::int64_t k = step % 2 == 1 ? (step + 1) / 2 : -step / 2;
    std::vector<SignedAtom> terms;
    for (const auto& a : model.spectral.atoms()) {
      if (a.seq[k] != 0.0) {
        terms.push_back({k, ShiftAndRescale(a.seq, k), a.weight, true});
      }
      const double tilt = Pow(a.seq[-k], model.alpha);
      if (tilt > 0.0) terms.push_back({k, a.seq, -a.weight * tilt, false});
    }
    TcfReport r = CompareSigned(std::move(terms), tol, false);
    if (r.max_violation > worst.max_violation) worst = std::move(r);
  }
  worst.valid = worst.max_violation <= tol;
  if (worst.valid) worst.witness.reset();
  return worst;
}

TcfReport MeckeCheck(const TailModel& model, double tol) {
  CheckTailModel(model);
  std::vector<SignedAtom> terms;
  for (const auto& a : model.spectral.atoms()) {
    for (const auto& e : a.seq.entries()) {
      terms.push_back({-e.index, ShiftAndRescale(a.seq, e.index), a.weight, true});
      terms.push_back(
          {e.index, a.seq, -a.weight * Pow(e.value, model.alpha), false});
    }
  }
  return CompareSigned(std::move(terms), tol, true);
}

AnchoredModel AnchoredFromSpectral(const TailModel& model) {
  CheckTailModel(model);
  std::vector<Atom> out;
  for (const auto& a : model.spectral.atoms()) {
    const double mass = Pow(SupNorm(a.seq), model.alpha) /
                        AlphaMass(a.seq, model.alpha);
    out.push_back({NormalizedCanonicalForm(a.seq), a.weight * mass});
  }
  return {model.alpha, AtomicDist::FromUnnormalized(std::move(out)).dist};
}

TailModel SpectralFromAnchored(const AnchoredModel& model) {
  CheckAnchoredModel(model);
  std::vector<Atom> out;
  for (const auto& a : model.q.atoms()) {
    for (const auto& e : a.seq.entries()) {
      out.push_back({ShiftAndRescale(a.seq, e.index),
                     a.weight * Pow(e.value, model.alpha)});
    }
  }
  return {model.alpha, AtomicDist::FromUnnormalized(std::move(out)).dist};
}

TailModel RsTransform(const TailModel& model) {
  CheckTailModel(model);
  std::vector<Atom> out;
  for (const auto& a : model.spectral.atoms()) {
    const double total = AlphaMass(a.seq, model.alpha);
    for (const auto& e : a.seq.entries()) {
      out.push_back({ShiftAndRescale(a.seq, e.index),
                     a.weight * Pow(e.value, model.alpha) / total});
    }
  }
  return {model.alpha, AtomicDist::FromUnnormalized(std::move(out)).dist};
}

double ExtremalIndexSpectral(const TailModel& model) {
  double theta = 0.0;
  for (const auto& a : model.spectral.atoms()) {
    theta += a.weight * Pow(SupNorm(a.seq), model.alpha) /
             AlphaMass(a.seq, model.alpha);
  }
  return theta;
}

std::vector<MagnitudePiece> MagnitudePieces(const LatticeSeq& x, double alpha) {
  // Thresholds t_k = 1/|x_k|: index k exceeds on (lo, hi] iff t_k <= lo.
  std::vector<std::pair<double, std::int64_t>> thresholds;
  thresholds.reserve(x.support_size());
  for (const auto& e : x.entries()) {
    thresholds.push_back({1.0 / std::abs(e.value), e.index});
  }
  std::vector<double> cuts;
  for (const auto& [t, k] : thresholds) {
    if (t > 1.0) cuts.push_back(t);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  cuts.push_back(std::numeric_limits<double>::infinity());

  std::vector<MagnitudePiece> pieces;
  double lo = 1.0;
  for (double hi : cuts) {
    MagnitudePiece piece;
    piece.lo = lo;
    piece.hi = hi;
    piece.prob = std::pow(lo, -alpha) - (std::isinf(hi) ? 0.0 : std::pow(hi, -alpha));
    for (const auto& [t, k] : thresholds) {
      if (t <= lo) piece.exceed.push_back(k);
    }
    std::sort(piece.exceed.begin(), piece.exceed.end());
    pieces.push_back(std::move(piece));
    lo = hi;
  }
  return pieces;
}

double ExtremalIndexInverseCount(const TailModel& model) {
  double theta = 0.0;
  for (const auto& a : model.spectral.atoms()) {
    for (const auto& piece : MagnitudePieces(a.seq, model.alpha)) {
      if (piece.exceed.empty()) continue;
      theta += a.weight * piece.prob / static_cast<double>(piece.exceed.size());
    }
  }
  return theta;
}

double MeanAlphaMass(const AnchoredModel& model) {
  double total = 0.0;
  for (const auto& a : model.q.atoms()) {
    total += a.weight * AlphaMass(a.seq, model.alpha);
  }
  return total;
}

Pattern PatternOf(const LatticeSeq& y, int half_width) {
  Pattern p = 0;
  for (const auto& e : y.entries()) {
    if (e.index < -half_width || e.index > half_width) continue;
    if (std::abs(e.value) > 1.0) p |= Pattern{1} << (e.index + half_width);
  }
  return p;
}

std::string PatternDescription(Pattern pattern, int half_width) {
  std::string s;
  for (int j = 0; j <= 2 * half_width; ++j) {
    s += (pattern >> j) & 1 ? 'X' : '.';
  }
  return s;
}

std::map<Pattern, double> ExactPatternLaw(const TailModel& model,
                                          int half_width) {
  if (half_width < 0 || half_width > 31) {
    throw Error(ErrorCode::kInvalidArgument, "window half width must be 0..31");
  }
  std::map<Pattern, double> law;
  for (const auto& a : model.spectral.atoms()) {
    for (const auto& piece : MagnitudePieces(a.seq, model.alpha)) {
      Pattern p = 0;
      for (std::int64_t k : piece.exceed) {
        if (k >= -half_width && k <= half_width) {
          p |= Pattern{1} << (k + half_width);
        }
      }
      law[p] += a.weight * piece.prob;
    }
  }
  return law;
}

double ExpectedExceedanceCount(const TailModel& model) {
  double total = 0.0;
  for (const auto& a : model.spectral.atoms()) {
    for (const auto& piece : MagnitudePieces(a.seq, model.alpha)) {
      total += a.weight * piece.prob * static_cast<double>(piece.exceed.size());
    }
  }
  return total;
}

double ExceedanceProbabilityAt(const TailModel& model, std::int64_t k) {
  // P(P |theta_k| > 1) = min(1, |theta_k|^alpha).
  double total = 0.0;
  for (const auto& a : model.spectral.atoms()) {
    total += a.weight * std::min(1.0, Pow(a.seq[k], model.alpha));
  }
  return total;
}

}  // namespace tailproc
