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

#include "tailproc/lattice_seq.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include "tailproc/error.hpp"

namespace tailproc {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

template <typename T>
T ParseNumber(std::string_view token, std::string_view what) {
  token = Trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  T value{};
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (token.empty() || ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::kParseError,
                "bad " + std::string(what) + " '" + std::string(token) + "'");
  }
  return value;
}

bool ValuesClose(double a, double b, double rel_tol) {
  return std::abs(a - b) <= rel_tol * std::max(std::abs(a), std::abs(b));
}

}  // namespace

LatticeSeq::LatticeSeq(std::vector<SeqEntry> entries) {
  std::erase_if(entries, [](const SeqEntry& e) { return e.value == 0.0; });
  std::sort(entries.begin(), entries.end(),
            [](const SeqEntry& a, const SeqEntry& b) { return a.index < b.index; });
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!std::isfinite(entries[i].value)) {
      throw Error(ErrorCode::kInvalidSequence,
                  "non-finite value at index " + std::to_string(entries[i].index));
    }
    if (i > 0 && entries[i].index == entries[i - 1].index) {
      throw Error(ErrorCode::kInvalidSequence,
                  "duplicate index " + std::to_string(entries[i].index));
    }
  }
  entries_ = std::move(entries);
}

LatticeSeq LatticeSeq::FromDense(std::span<const double> values,
                                 std::int64_t first_index) {
  std::vector<SeqEntry> entries;
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (values[j] != 0.0) {
      entries.push_back({first_index + static_cast<std::int64_t>(j), values[j]});
    }
  }
  return LatticeSeq(std::move(entries));
}

double LatticeSeq::operator[](std::int64_t i) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), i,
      [](const SeqEntry& e, std::int64_t idx) { return e.index < idx; });
  return (it != entries_.end() && it->index == i) ? it->value : 0.0;
}

LatticeSeq LatticeSeq::Scaled(double t) const {
  std::vector<SeqEntry> out(entries_.begin(), entries_.end());
  for (auto& e : out) e.value *= t;
  return LatticeSeq(std::move(out));
}

std::string LatticeSeq::ToString() const {
  std::string out;
  for (const auto& e : entries_) {
    if (!out.empty()) out += ',';
    out += std::to_string(e.index);
    out += ':';
    out += FormatDouble(e.value);
  }
  return out;
}

LatticeSeq ParseSequence(std::string_view text) {
  text = Trim(text);
  std::vector<SeqEntry> entries;
  while (!text.empty()) {
    const auto comma = text.find(',');
    std::string_view item = Trim(text.substr(0, comma));
    text = comma == std::string_view::npos ? std::string_view{}
                                           : text.substr(comma + 1);
    const auto colon = item.find(':');
    if (colon == std::string_view::npos) {
      throw Error(ErrorCode::kParseError,
                  "expected index:value, got '" + std::string(item) + "'");
    }
    entries.push_back({ParseNumber<std::int64_t>(item.substr(0, colon), "index"),
                       ParseNumber<double>(item.substr(colon + 1), "value")});
  }
  return LatticeSeq(std::move(entries));
}

bool ExceedanceSet::contains(std::int64_t k) const {
  return std::binary_search(indices.begin(), indices.end(), k);
}

LatticeSeq Shift(const LatticeSeq& x, std::int64_t k) {
  std::vector<SeqEntry> out(x.entries().begin(), x.entries().end());
  for (auto& e : out) e.index -= k;
  return LatticeSeq(std::move(out));
}

ExceedanceSet ExceedanceSetOf(const LatticeSeq& x) {
  ExceedanceSet set;
  for (const auto& e : x.entries()) {
    if (std::abs(e.value) > 1.0) set.indices.push_back(e.index);
  }
  return set;
}

std::size_t ExceedanceCount(const LatticeSeq& x) {
  return static_cast<std::size_t>(
      std::count_if(x.entries().begin(), x.entries().end(),
                    [](const SeqEntry& e) { return std::abs(e.value) > 1.0; }));
}

double SupNorm(const LatticeSeq& x) {
  double m = 0.0;
  for (const auto& e : x.entries()) m = std::max(m, std::abs(e.value));
  return m;
}

double AlphaMass(const LatticeSeq& x, double alpha) {
  double s = 0.0;
  for (const auto& e : x.entries()) s += std::pow(std::abs(e.value), alpha);
  return s;
}

std::int64_t AnchorFirstExceedance(const LatticeSeq& x) {
  for (const auto& e : x.entries()) {
    if (std::abs(e.value) > 1.0) return e.index;
  }
  throw Error(ErrorCode::kEmptyExceedanceSet,
              "sequence has no exceedance point: " + x.ToString());
}

std::int64_t AnchorFirstMaximum(const LatticeSeq& x) {
  if (x.empty()) throw Error(ErrorCode::kZeroSequence, "first maximum of 0");
  std::int64_t best = x.entries().front().index;
  double best_abs = std::abs(x.entries().front().value);
  for (const auto& e : x.entries()) {
    if (std::abs(e.value) > best_abs) {
      best_abs = std::abs(e.value);
      best = e.index;
    }
  }
  return best;
}

std::int64_t AnchorOf(Anchor anchor, const LatticeSeq& x) {
  return anchor == Anchor::kFirstExceedance ? AnchorFirstExceedance(x)
                                            : AnchorFirstMaximum(x);
}

std::string_view AnchorName(Anchor anchor) {
  return anchor == Anchor::kFirstExceedance ? "fe" : "fm";
}

namespace {

ExceedanceSet RequireE0(const LatticeSeq& x) {
  ExceedanceSet e = ExceedanceSetOf(x);
  if (!e.contains(0)) {
    throw Error(ErrorCode::kNotInE0,
                "origin is not an exceedance point of " + x.ToString());
  }
  return e;
}

// Nearest other exceedance point of e.indices[pos]; ties go to the smaller
// index. Requires e.size() >= 2.
std::int64_t NearestOther(const ExceedanceSet& e, std::size_t pos) {
  const std::int64_t k = e.indices[pos];
  std::int64_t best = 0;
  std::int64_t best_dist = -1;
  // Only the immediate neighbours in sorted order can be nearest; the left
  // one is listed first so it wins ties.
  if (pos > 0) {
    best = e.indices[pos - 1];
    best_dist = k - best;
  }
  if (pos + 1 < e.size()) {
    const std::int64_t right = e.indices[pos + 1];
    if (best_dist < 0 || right - k < best_dist) best = right;
  }
  return best;
}

}  // namespace

std::int64_t TauCyclic(const LatticeSeq& x, std::int64_t n) {
  const ExceedanceSet e = RequireE0(x);
  const auto size = static_cast<std::int64_t>(e.size());
  const auto pos = static_cast<std::int64_t>(
      std::lower_bound(e.indices.begin(), e.indices.end(), 0) -
      e.indices.begin());
  const std::int64_t target = ((pos + n) % size + size) % size;
  return e.indices[static_cast<std::size_t>(target)];
}

std::int64_t TauNearest(const LatticeSeq& x) {
  const ExceedanceSet e = RequireE0(x);
  if (e.size() == 1) return 0;
  const auto pos = static_cast<std::size_t>(
      std::lower_bound(e.indices.begin(), e.indices.end(), 0) -
      e.indices.begin());
  const std::int64_t partner = NearestOther(e, pos);
  const auto partner_pos = static_cast<std::size_t>(
      std::lower_bound(e.indices.begin(), e.indices.end(), partner) -
      e.indices.begin());
  return NearestOther(e, partner_pos) == 0 ? partner : 0;
}

ExceedanceMap CyclicMap(std::int64_t n) {
  return [n](const LatticeSeq& x) { return TauCyclic(x, n); };
}

ExceedanceMap NearestMap() {
  return [](const LatticeSeq& x) { return TauNearest(x); };
}

ExceedanceMap AnchorMap(Anchor anchor) {
  return [anchor](const LatticeSeq& x) { return AnchorOf(anchor, x); };
}

std::int64_t AssociatedIndex(const LatticeSeq& x, const ExceedanceMap& tau,
                             std::int64_t k) {
  return k + tau(Shift(x, k));
}

bool IsBijectiveOn(const LatticeSeq& x, const ExceedanceMap& tau) {
  const ExceedanceSet e = ExceedanceSetOf(x);
  std::vector<std::int64_t> image;
  image.reserve(e.size());
  for (std::int64_t k : e.indices) image.push_back(AssociatedIndex(x, tau, k));
  std::sort(image.begin(), image.end());
  return image == e.indices;
}

LatticeSeq ExceedanceShift(const LatticeSeq& x, const ExceedanceMap& tau) {
  return Shift(x, tau(x));
}

LatticeSeq CanonicalizeModShift(const LatticeSeq& x) {
  return Shift(x, AnchorFirstMaximum(x));
}

bool ApproxEqual(const LatticeSeq& a, const LatticeSeq& b, double rel_tol) {
  return CompareApprox(a, b, rel_tol) == 0;
}

int CompareApprox(const LatticeSeq& a, const LatticeSeq& b, double rel_tol) {
  if (a.support_size() != b.support_size()) {
    return a.support_size() < b.support_size() ? -1 : 1;
  }
  const auto ea = a.entries();
  const auto eb = b.entries();
  for (std::size_t i = 0; i < ea.size(); ++i) {
    if (ea[i].index != eb[i].index) return ea[i].index < eb[i].index ? -1 : 1;
  }
  for (std::size_t i = 0; i < ea.size(); ++i) {
    if (!ValuesClose(ea[i].value, eb[i].value, rel_tol)) {
      return ea[i].value < eb[i].value ? -1 : 1;
    }
  }
  return 0;
}

std::string FormatDouble(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace tailproc
