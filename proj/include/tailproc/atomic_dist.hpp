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

// Finite laws over lattice sequences, and the two model types built on them:
// a spectral tail law and an anchored (cluster) law.

#ifndef TAILPROC_ATOMIC_DIST_HPP_
#define TAILPROC_ATOMIC_DIST_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "tailproc/lattice_seq.hpp"

namespace tailproc {

struct Atom {
  LatticeSeq seq;
  double weight;
};

// Sorts atoms, merges sequences equal within rel_tol and drops non-positive
// weights. Does not normalize.
std::vector<Atom> MergeAtoms(std::vector<Atom> atoms, double rel_tol = 1e-12);

// A probability law on finitely many sequences. Weights are positive and sum
// to one; no two atoms are approximately equal.
class AtomicDist {
 public:
  AtomicDist() = default;

  // Merges duplicates, then checks the invariants. Throws
  // kInvalidDistribution.
  explicit AtomicDist(std::vector<Atom> atoms);

  struct Normalized;
  // Merges and rescales arbitrary positive masses; also returns the total.
  static Normalized FromUnnormalized(std::vector<Atom> atoms);

  static AtomicDist Dirac(LatticeSeq seq);

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }

  // Weight of the atom approximately equal to seq; 0 if absent.
  double WeightOf(const LatticeSeq& seq, double rel_tol = 1e-12) const;

  // Largest absolute weight difference over the union of atoms; sequences
  // present on one side only count with their full weight.
  double MaxWeightDifference(const AtomicDist& other,
                             double rel_tol = 1e-12) const;

  bool ApproxEquals(const AtomicDist& other, double weight_tol = 1e-12,
                    double rel_tol = 1e-12) const;

  // One line per atom: "weight | index:value,...".
  std::string ToText() const;

 private:
  std::vector<Atom> atoms_;
};

struct AtomicDist::Normalized {
  AtomicDist dist;
  double total_mass;
};

// Parses the text form. Blank lines and lines starting with '#' are
// skipped. The first problem is reported with its line number.
AtomicDist ParseAtomicDist(std::string_view text);

// Law of the spectral tail process: Y = P * Theta with P Pareto(alpha)
// independent of Theta.
struct TailModel {
  double alpha = 1.0;
  AtomicDist spectral;
};

// Law of a representative Q of the anchored spectral process: every atom has
// sup norm one and its first maximum at the origin.
struct AnchoredModel {
  double alpha = 1.0;
  AtomicDist q;
};

// Throws kMalformedModel when alpha <= 0 or some atom has |theta_0| != 1.
void CheckTailModel(const TailModel& model);

// Throws kMalformedModel when alpha <= 0 or some atom is not normalized and
// canonical.
void CheckAnchoredModel(const AnchoredModel& model);

}  // namespace tailproc

#endif  // TAILPROC_ATOMIC_DIST_HPP_
