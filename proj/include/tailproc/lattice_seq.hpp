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

// Finitely supported real sequences on Z and the shift / exceedance /
// anchoring combinatorics built on them.

#ifndef TAILPROC_LATTICE_SEQ_HPP_
#define TAILPROC_LATTICE_SEQ_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tailproc {

struct SeqEntry {
  std::int64_t index;
  double value;

  friend bool operator==(const SeqEntry&, const SeqEntry&) = default;
};

// A real sequence x = (x_i) on Z with finite support. Entries are kept
// sorted by index; zero values are never stored.
class LatticeSeq {
 public:
  LatticeSeq() = default;

  // Sorts by index and drops zero values. Duplicate indices or non-finite
  // values throw Error(kInvalidSequence).
  explicit LatticeSeq(std::vector<SeqEntry> entries);

  // Builds x with x_{first_index + j} = values[j].
  static LatticeSeq FromDense(std::span<const double> values,
                              std::int64_t first_index);

  // x_i, zero outside the support.
  double operator[](std::int64_t i) const;

  std::span<const SeqEntry> entries() const { return entries_; }
  std::size_t support_size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::int64_t min_index() const { return entries_.front().index; }
  std::int64_t max_index() const { return entries_.back().index; }

  LatticeSeq Scaled(double t) const;

  // "index:value,index:value,..." with shortest round-trip values.
  std::string ToString() const;

  friend bool operator==(const LatticeSeq&, const LatticeSeq&) = default;

 private:
  std::vector<SeqEntry> entries_;
};

// Parses the textual literal "-1:0.5,0:2.0,1:1.5". An empty (or all blank)
// string is the zero sequence.
LatticeSeq ParseSequence(std::string_view text);

// Exceedance points e(x) = {k : |x_k| > 1}, sorted.
struct ExceedanceSet {
  std::vector<std::int64_t> indices;

  bool contains(std::int64_t k) const;
  std::size_t size() const { return indices.size(); }
  bool empty() const { return indices.empty(); }

  friend bool operator==(const ExceedanceSet&, const ExceedanceSet&) = default;
};

// shift(x, k)_i = x_{i+k}: moves the origin to k.
LatticeSeq Shift(const LatticeSeq& x, std::int64_t k);

ExceedanceSet ExceedanceSetOf(const LatticeSeq& x);
std::size_t ExceedanceCount(const LatticeSeq& x);

double SupNorm(const LatticeSeq& x);

// sum_k |x_k|^alpha
double AlphaMass(const LatticeSeq& x, double alpha);

// min e(x). Throws kEmptyExceedanceSet.
std::int64_t AnchorFirstExceedance(const LatticeSeq& x);

// Smallest index attaining max |x_i|. Throws kZeroSequence.
std::int64_t AnchorFirstMaximum(const LatticeSeq& x);

enum class Anchor { kFirstExceedance, kFirstMaximum };

std::int64_t AnchorOf(Anchor anchor, const LatticeSeq& x);
std::string_view AnchorName(Anchor anchor);

// The exceedance point n steps after the origin in the cyclically ordered
// e(x). Throws kNotInE0 unless 0 is in e(x).
std::int64_t TauCyclic(const LatticeSeq& x, std::int64_t n);

// Mutual nearest-neighbour pairing of exceedance points; 0 when the origin
// has no mutual partner. Throws kNotInE0 unless 0 is in e(x).
std::int64_t TauNearest(const LatticeSeq& x);

// An exceedance map picks one exceedance point of x (possibly the origin).
using ExceedanceMap = std::function<std::int64_t(const LatticeSeq&)>;

ExceedanceMap CyclicMap(std::int64_t n);
ExceedanceMap NearestMap();
ExceedanceMap AnchorMap(Anchor anchor);

// tau(x, k) = k + tau(shift(x, k)) for k in e(x).
std::int64_t AssociatedIndex(const LatticeSeq& x, const ExceedanceMap& tau,
                             std::int64_t k);

// True when k -> tau(x, k) permutes e(x).
bool IsBijectiveOn(const LatticeSeq& x, const ExceedanceMap& tau);

// shift(x, tau(x)).
LatticeSeq ExceedanceShift(const LatticeSeq& x, const ExceedanceMap& tau);

// shift(x, A_fm(x)); shift-equivalent sequences share one canonical form.
LatticeSeq CanonicalizeModShift(const LatticeSeq& x);

// Same support and values equal within rel_tol (relative to the larger
// magnitude).
bool ApproxEqual(const LatticeSeq& a, const LatticeSeq& b,
                 double rel_tol = 1e-12);

// Total order used to sort atoms; values within rel_tol compare equal.
int CompareApprox(const LatticeSeq& a, const LatticeSeq& b,
                  double rel_tol = 1e-12);

// Shortest representation that round-trips through from_chars.
std::string FormatDouble(double v);

}  // namespace tailproc

#endif  // TAILPROC_LATTICE_SEQ_HPP_
