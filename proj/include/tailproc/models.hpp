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

// Finite-stencil moving averages X_i = sum_k C_{i,k} Z_{i-k} with random
// coefficients driven by discrete marks, and the exact tail laws they induce.

#ifndef TAILPROC_MODELS_HPP_
#define TAILPROC_MODELS_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "tailproc/atomic_dist.hpp"
#include "tailproc/expr.hpp"

namespace tailproc {

// Two-sided Pareto innovations: |Z| ~ Pareto(alpha), sign + with prob p.
struct InnovationSpec {
  double alpha = 1.2;
  double p = 1.0;
};

struct MarkLaw {
  std::string name;
  std::vector<double> values;
  std::vector<double> probs;
};

enum class MarkSharing {
  kPerIndex,  // every index i draws its own marks for row i
  kGlobal,    // one mark draw per path, shared by all rows
};

// One coefficient row C_{i,0..m-1} for a joint mark value, with its
// probability.
struct CoefRow {
  std::vector<double> coef;
  double prob;
};

struct MAStencilModel {
  std::string name;
  InnovationSpec innovation;
  std::vector<MarkLaw> marks;
  std::vector<Expr> coefficients;  // lag 0..m-1
  MarkSharing sharing = MarkSharing::kPerIndex;

  int window() const { return static_cast<int>(coefficients.size()); }
};

inline constexpr std::size_t kDefaultMarkSpaceCap = 1'000'000;

// Every joint mark value with its row. Rows with equal coefficients are not
// merged. Throws kMarkSpaceTooLarge, kDegenerateModel (a row that is zero
// with positive probability) and kMalformedModel.
std::vector<CoefRow> EnumerateRows(const MAStencilModel& model,
                                   std::size_t cap = kDefaultMarkSpaceCap);

// Law of the diagonal coefficients C_k = C_{k,k}, k = 0..m-1.
AtomicDist DiagonalLaw(const MAStencilModel& model,
                       std::size_t cap = kDefaultMarkSpaceCap);

// sum_k E|C_k|^alpha.
double TailConstant(const MAStencilModel& model);

TailModel MaSpectral(const MAStencilModel& model);
AnchoredModel MaAnchored(const MAStencilModel& model);
double MaExtremalIndex(const MAStencilModel& model);

// Limit law of the process seen from a uniformly chosen exceedance. Equals
// MaSpectral for per-index marks; for a global mark it is the mixture over
// the mark of each fixed-coefficient model's spectral law.
TailModel RandomizedOriginLimit(const MAStencilModel& model);

// Model description in JSON:
// {"innovation": {"alpha": a, "p": p}, "params": {"b": 0.5},
//  "marks": {"eps": [{"value": 0, "prob": 0.5}, ...]},
//  "coefficients": ["1", "eps*b"], "mark_sharing": "per_index"|"global"}
// Throws kConfigError naming the offending field.
MAStencilModel ParseModelJson(std::string_view json_text);

// Canonical JSON for the model, used to fingerprint cached calibrations.
std::string ModelFingerprint(const MAStencilModel& model);

struct PresetParams {
  double alpha = 1.2;
  double p = 1.0;
  double b = 1.0;
};

// "iid", "example-1.1", "example-5.1", "example-5.2", "three-lag-remark".
MAStencilModel MakePreset(std::string_view name, const PresetParams& params);
std::vector<std::string> PresetNames();

// Builds a model from explicit per-lag expressions.
MAStencilModel MakeStencilModel(std::string name, InnovationSpec innovation,
                                std::vector<MarkLaw> marks,
                                const std::vector<std::string>& coefficients,
                                MarkSharing sharing,
                                const std::map<std::string, double>& params = {});

}  // namespace tailproc

#endif  // TAILPROC_MODELS_HPP_
