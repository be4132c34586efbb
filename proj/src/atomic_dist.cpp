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

#include "tailproc/atomic_dist.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "tailproc/error.hpp"

namespace tailproc {
namespace {

constexpr double kWeightSumTol = 1e-12;

}  // namespace

std::vector<Atom> MergeAtoms(std::vector<Atom> atoms, double rel_tol) {
  std::erase_if(atoms, [](const Atom& a) { return !(a.weight > 0.0); });
  std::stable_sort(atoms.begin(), atoms.end(),
                   [rel_tol](const Atom& a, const Atom& b) {
                     return CompareApprox(a.seq, b.seq, rel_tol) < 0;
                   });
  std::vector<Atom> merged;
  merged.reserve(atoms.size());
  for (auto& a : atoms) {
    if (!merged.empty() && ApproxEqual(merged.back().seq, a.seq, rel_tol)) {
      merged.back().weight += a.weight;
    } else {
      merged.push_back(std::move(a));
    }
  }
  return merged;
}

AtomicDist::AtomicDist(std::vector<Atom> atoms) {
  for (const auto& a : atoms) {
    if (!std::isfinite(a.weight) || a.weight <= 0.0) {
      throw Error(ErrorCode::kInvalidDistribution,
                  "non-positive weight " + FormatDouble(a.weight) +
                      " for atom " + a.seq.ToString());
    }
  }
  atoms_ = MergeAtoms(std::move(atoms));
  if (atoms_.empty()) {
    throw Error(ErrorCode::kInvalidDistribution, "no atoms");
  }
  double sum = 0.0;
  for (const auto& a : atoms_) sum += a.weight;
  if (std::abs(sum - 1.0) > kWeightSumTol) {
    throw Error(ErrorCode::kInvalidDistribution,
                "weights sum to " + FormatDouble(sum));
  }
}

AtomicDist::Normalized AtomicDist::FromUnnormalized(std::vector<Atom> atoms) {
  auto merged = MergeAtoms(std::move(atoms));
  double total = 0.0;
  for (const auto& a : merged) total += a.weight;
  if (merged.empty() || !(total > 0.0) || !std::isfinite(total)) {
    throw Error(ErrorCode::kInvalidDistribution, "zero total mass");
  }
  for (auto& a : merged) a.weight /= total;
  AtomicDist out;
  out.atoms_ = std::move(merged);
  return {std::move(out), total};
}

AtomicDist AtomicDist::Dirac(LatticeSeq seq) {
  return AtomicDist({{std::move(seq), 1.0}});
}

double AtomicDist::WeightOf(const LatticeSeq& seq, double rel_tol) const {
  for (const auto& a : atoms_) {
    if (ApproxEqual(a.seq, seq, rel_tol)) return a.weight;
  }
  return 0.0;
}

double AtomicDist::MaxWeightDifference(const AtomicDist& other,
                                       double rel_tol) const {
  std::vector<Atom> both;
  both.reserve(atoms_.size() + other.atoms_.size());
  for (const auto& a : atoms_) both.push_back(a);
  for (const auto& a : other.atoms_) both.push_back({a.seq, -a.weight});
  std::stable_sort(both.begin(), both.end(),
                   [rel_tol](const Atom& a, const Atom& b) {
                     return CompareApprox(a.seq, b.seq, rel_tol) < 0;
                   });
  double worst = 0.0;
  std::size_t i = 0;
  while (i < both.size()) {
    double net = both[i].weight;
    std::size_t j = i + 1;
    while (j < both.size() && ApproxEqual(both[i].seq, both[j].seq, rel_tol)) {
      net += both[j].weight;
      ++j;
    }
    worst = std::max(worst, std::abs(net));
    i = j;
  }
  return worst;
}

bool AtomicDist::ApproxEquals(const AtomicDist& other, double weight_tol,
                              double rel_tol) const {
  return MaxWeightDifference(other, rel_tol) <= weight_tol;
}

std::string AtomicDist::ToText() const {
  std::string out;
  for (const auto& a : atoms_) {
    out += FormatDouble(a.weight);
    out += " | ";
    out += a.seq.ToString();
    out += '\n';
  }
  return out;
}

AtomicDist ParseAtomicDist(std::string_view text) {
  std::vector<Atom> atoms;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos || line[first] == '#') continue;
    const auto bar = line.find('|');
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (bar == std::string_view::npos) {
      throw Error(ErrorCode::kParseError, where + "expected 'weight | sequence'");
    }
    std::string_view wtext = line.substr(0, bar);
    while (!wtext.empty() && (wtext.front() == ' ' || wtext.front() == '\t')) {
      wtext.remove_prefix(1);
    }
    while (!wtext.empty() && (wtext.back() == ' ' || wtext.back() == '\t')) {
      wtext.remove_suffix(1);
    }
    double w = 0.0;
    auto [ptr, ec] = std::from_chars(wtext.data(), wtext.data() + wtext.size(), w);
    if (wtext.empty() || ec != std::errc() || ptr != wtext.data() + wtext.size()) {
      throw Error(ErrorCode::kParseError,
                  where + "bad weight '" + std::string(wtext) + "'");
    }
    if (!(w > 0.0)) {
      throw Error(ErrorCode::kInvalidDistribution,
                  where + "weight must be positive");
    }
    try {
      atoms.push_back({ParseSequence(line.substr(bar + 1)), w});
    } catch (const Error& e) {
      throw Error(e.code(), where + e.what());
    }
  }
  return AtomicDist(std::move(atoms));
}

void CheckTailModel(const TailModel& model) {
  if (!(model.alpha > 0.0) || !std::isfinite(model.alpha)) {
    throw Error(ErrorCode::kMalformedModel, "alpha must be positive");
  }
  for (const auto& a : model.spectral.atoms()) {
    if (std::abs(std::abs(a.seq[0]) - 1.0) > 1e-12) {
      throw Error(ErrorCode::kMalformedModel,
                  "spectral atom with |theta_0| != 1: " + a.seq.ToString());
    }
  }
}

void CheckAnchoredModel(const AnchoredModel& model) {
  if (!(model.alpha > 0.0) || !std::isfinite(model.alpha)) {
    throw Error(ErrorCode::kMalformedModel, "alpha must be positive");
  }
  for (const auto& a : model.q.atoms()) {
    if (a.seq.empty() || std::abs(SupNorm(a.seq) - 1.0) > 1e-12) {
      throw Error(ErrorCode::kMalformedModel,
                  "anchored atom without unit sup norm: " + a.seq.ToString());
    }
    // First maximum at the origin, allowing rounding-level ties.
    if (std::abs(std::abs(a.seq[0]) - 1.0) > 1e-12) {
      throw Error(ErrorCode::kMalformedModel,
                  "anchored atom not centred at its maximum: " + a.seq.ToString());
    }
    for (const auto& e : a.seq.entries()) {
      if (e.index >= 0) break;
      if (std::abs(e.value) >= 1.0 - 1e-12) {
        throw Error(ErrorCode::kMalformedModel,
                    "anchored atom has an earlier maximum: " + a.seq.ToString());
      }
    }
  }
}

}  // namespace tailproc
