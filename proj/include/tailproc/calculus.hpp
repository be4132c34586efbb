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

// Exact calculus on finite-atom tail laws: validity checks, the dualities
// between spectral and anchored laws, and extremal indices.

#ifndef TAILPROC_CALCULUS_HPP_
#define TAILPROC_CALCULUS_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tailproc/atomic_dist.hpp"

namespace tailproc {

// x / ||x|| shifted so that its first (approximate) maximum sits at the
// origin. Values within rel_tol of the maximum count as ties, so rounding
// noise cannot move the anchor.
LatticeSeq NormalizedCanonicalForm(const LatticeSeq& x, double rel_tol = 1e-12);

struct TcfWitness {
  std::int64_t k = 0;
  LatticeSeq atom;
  double left_mass = 0.0;
  double right_mass = 0.0;
};

struct TcfReport {
  bool valid = true;
  double max_violation = 0.0;
  std::optional<TcfWitness> witness;
};

// Largest |k| for which some atom has theta_k != 0 or theta_{-k} != 0.
std::int64_t MaxSupportRadius(const AtomicDist& dist);

// Checks, for every |k| <= k_range, that the law of shift(Theta, k)/|Theta_k|
// on {Theta_k != 0} equals the law of Theta tilted by |Theta_{-k}|^alpha,
// atom by atom. k_range defaults to MaxSupportRadius; smaller values throw
// kInvalidArgument.
TcfReport TcfCheck(const TailModel& model,
                   std::optional<std::int64_t> k_range = std::nullopt,
                   double tol = 1e-10);

// The same identity in its summed form: one measure on (lag, sequence)
// pairs per side, compared in a single pass.
TcfReport MeckeCheck(const TailModel& model, double tol = 1e-10);

// Cluster law of the first-maximum anchor: atoms canonical(theta/||theta||)
// with mass w ||theta||^alpha / sum_k |theta_k|^alpha.
AnchoredModel AnchoredFromSpectral(const TailModel& model);

// Inverse of AnchoredFromSpectral: atoms shift(q, k)/|q_k| with mass
// w |q_k|^alpha.
TailModel SpectralFromAnchored(const AnchoredModel& model);

// Replaces Theta by shift(Theta, T)/|Theta_T| with
// P(T = k | Theta) = |Theta_k|^alpha / sum_j |Theta_j|^alpha.
TailModel RsTransform(const TailModel& model);

// E[||Theta||^alpha / sum_k |Theta_k|^alpha].
double ExtremalIndexSpectral(const TailModel& model);

// E[1 / |e(Y)|] by exact integration over the Pareto magnitude.
double ExtremalIndexInverseCount(const TailModel& model);

// E[sum_k |Q_k|^alpha].
double MeanAlphaMass(const AnchoredModel& model);

// On the magnitude interval (lo, hi] of a Pareto(alpha) variable P, the
// indices k with |P x_k| > 1 are exactly `exceed`. prob = P(lo < P <= hi).
struct MagnitudePiece {
  double lo = 1.0;
  double hi = 1.0;
  double prob = 0.0;
  std::vector<std::int64_t> exceed;
};

// Partition of (1, inf) into pieces on which e(P x) is constant.
std::vector<MagnitudePiece> MagnitudePieces(const LatticeSeq& x, double alpha);

// Bit j of a pattern is set when offset j - half_width exceeds 1 in modulus.
using Pattern = std::uint64_t;

Pattern PatternOf(const LatticeSeq& y, int half_width);

// 'X' for an exceedance, '.' otherwise, offsets left to right.
std::string PatternDescription(Pattern pattern, int half_width);

// Exact law of the exceedance pattern of Y = P * Theta on the window.
std::map<Pattern, double> ExactPatternLaw(const TailModel& model,
                                          int half_width);

// E|e(Y)|.
double ExpectedExceedanceCount(const TailModel& model);

// P(|Y_k| > 1).
double ExceedanceProbabilityAt(const TailModel& model, std::int64_t k);

}  // namespace tailproc

#endif  // TAILPROC_CALCULUS_HPP_
