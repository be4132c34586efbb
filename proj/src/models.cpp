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

#include "tailproc/models.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "tailproc/calculus.hpp"
#include "tailproc/error.hpp"

namespace tailproc {
namespace {

using nlohmann::json;

void CheckModel(const MAStencilModel& model) {
  const auto& in = model.innovation;
  if (!(in.alpha > 0.0) || !std::isfinite(in.alpha)) {
    throw Error(ErrorCode::kMalformedModel, "innovation alpha must be positive");
  }
  if (!(in.p >= 0.0 && in.p <= 1.0)) {
    throw Error(ErrorCode::kMalformedModel, "innovation p must lie in [0, 1]");
  }
  if (model.coefficients.empty()) {
    throw Error(ErrorCode::kMalformedModel, "stencil has no coefficients");
  }
  for (const auto& m : model.marks) {
    if (m.values.empty() || m.values.size() != m.probs.size()) {
      throw Error(ErrorCode::kMalformedModel, "mark '" + m.name + "' has no support");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < m.values.size(); ++i) {
      if (!std::isfinite(m.values[i]) || !(m.probs[i] > 0.0)) {
        throw Error(ErrorCode::kMalformedModel,
                    "mark '" + m.name + "' needs finite values and positive probs");
      }
      sum += m.probs[i];
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw Error(ErrorCode::kMalformedModel,
                  "mark '" + m.name + "' probabilities sum to " + FormatDouble(sum));
    }
  }
}

// (sign, probability) pairs with positive probability.
std::vector<std::pair<double, double>> Signs(const InnovationSpec& in) {
  std::vector<std::pair<double, double>> out;
  if (in.p > 0.0) out.push_back({1.0, in.p});
  if (in.p < 1.0) out.push_back({-1.0, 1.0 - in.p});
  return out;
}

// kappa * shift(c, k) / |c_k| with the origin exactly kappa.
LatticeSeq SignedRescaledShift(const LatticeSeq& c, std::int64_t k, double kappa) {
  const double scale = std::abs(c[k]);
  std::vector<SeqEntry> out;
  out.reserve(c.support_size());
  for (const auto& e : c.entries()) {
    out.push_back({e.index - k, e.index == k ? kappa * std::copysign(1.0, e.value)
                                             : kappa * e.value / scale});
  }
  return LatticeSeq(std::move(out));
}

// Unnormalized spectral atoms of a diagonal law; total mass is the tail
// constant.
std::vector<Atom> SpectralAtoms(const std::vector<Atom>& diagonal,
                                const InnovationSpec& in) {
  std::vector<Atom> out;
  for (const auto& [kappa, wk] : Signs(in)) {
    for (const auto& a : diagonal) {
      for (const auto& e : a.seq.entries()) {
        out.push_back({SignedRescaledShift(a.seq, e.index, kappa),
                       a.weight * wk * std::pow(std::abs(e.value), in.alpha)});
      }
    }
  }
  return out;
}

double Total(const std::vector<Atom>& atoms) {
  double s = 0.0;
  for (const auto& a : atoms) s += a.weight;
  return s;
}

std::vector<std::string> MarkNames(const std::vector<MarkLaw>& marks) {
  std::vector<std::string> names;
  for (const auto& m : marks) names.push_back(m.name);
  return names;
}

}  // namespace

std::vector<CoefRow> EnumerateRows(const MAStencilModel& model, std::size_t cap) {
  CheckModel(model);
  std::size_t total = 1;
  for (const auto& m : model.marks) {
    if (total > cap / m.values.size()) {
      throw Error(ErrorCode::kMarkSpaceTooLarge,
                  "joint mark space exceeds " + std::to_string(cap));
    }
    total *= m.values.size();
  }
  std::vector<CoefRow> rows;
  rows.reserve(total);
  std::vector<std::size_t> digit(model.marks.size(), 0);
  std::vector<double> values(model.marks.size());
  for (std::size_t r = 0; r < total; ++r) {
    double prob = 1.0;
    for (std::size_t j = 0; j < model.marks.size(); ++j) {
      values[j] = model.marks[j].values[digit[j]];
      prob *= model.marks[j].probs[digit[j]];
    }
    CoefRow row{{}, prob};
    bool any = false;
    for (const auto& expr : model.coefficients) {
      const double v = expr.Eval(values);
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kMalformedModel,
                    "coefficient '" + expr.text() + "' is not finite");
      }
      any = any || v != 0.0;
      row.coef.push_back(v);
    }
    if (!any) {
      throw Error(ErrorCode::kDegenerateModel,
                  "all coefficients vanish with probability >= " + FormatDouble(prob));
    }
    rows.push_back(std::move(row));
    for (std::size_t j = 0; j < digit.size(); ++j) {
      if (++digit[j] < model.marks[j].values.size()) break;
      digit[j] = 0;
    }
  }
  return rows;
}

AtomicDist DiagonalLaw(const MAStencilModel& model, std::size_t cap) {
  const std::vector<CoefRow> rows = EnumerateRows(model, cap);
  std::vector<Atom> atoms;
  if (model.sharing == MarkSharing::kGlobal) {
    for (const auto& row : rows) {
      atoms.push_back({LatticeSeq::FromDense(row.coef, 0), row.prob});
    }
    return AtomicDist::FromUnnormalized(std::move(atoms)).dist;
  }
  // Independent marks per index: C_k only depends on the marks of index k,
  // so the diagonal law is the product of the per-lag marginals.
  const int m = model.window();
  std::vector<std::vector<std::pair<double, double>>> marginals(
      static_cast<std::size_t>(m));
  std::size_t total = 1;
  for (int k = 0; k < m; ++k) {
    std::map<double, double> law;
    for (const auto& row : rows) law[row.coef[static_cast<std::size_t>(k)]] += row.prob;
    auto& marginal = marginals[static_cast<std::size_t>(k)];
    marginal.assign(law.begin(), law.end());
    if (total > cap / marginal.size()) {
      throw Error(ErrorCode::kMarkSpaceTooLarge,
                  "diagonal law exceeds " + std::to_string(cap) + " atoms");
    }
    total *= marginal.size();
  }
  std::vector<std::size_t> digit(static_cast<std::size_t>(m), 0);
  std::vector<double> coef(static_cast<std::size_t>(m));
  for (std::size_t r = 0; r < total; ++r) {
    double prob = 1.0;
    for (std::size_t k = 0; k < digit.size(); ++k) {
      coef[k] = marginals[k][digit[k]].first;
      prob *= marginals[k][digit[k]].second;
    }
    atoms.push_back({LatticeSeq::FromDense(coef, 0), prob});
    for (std::size_t k = 0; k < digit.size(); ++k) {
      if (++digit[k] < marginals[k].size()) break;
      digit[k] = 0;
    }
  }
  return AtomicDist::FromUnnormalized(std::move(atoms)).dist;
}

double TailConstant(const MAStencilModel& model) {
  const AtomicDist diagonal = DiagonalLaw(model);
  double c = 0.0;
  for (const auto& a : diagonal.atoms()) {
    c += a.weight * AlphaMass(a.seq, model.innovation.alpha);
  }
  return c;
}

TailModel MaSpectral(const MAStencilModel& model) {
  const AtomicDist diagonal = DiagonalLaw(model);
  std::vector<Atom> atoms = SpectralAtoms(diagonal.atoms(), model.innovation);
  if (!(Total(atoms) > 0.0)) {
    throw Error(ErrorCode::kDegenerateModel, "tail constant is zero");
  }
  return {model.innovation.alpha,
          AtomicDist::FromUnnormalized(std::move(atoms)).dist};
}

AnchoredModel MaAnchored(const MAStencilModel& model) {
  const AtomicDist diagonal = DiagonalLaw(model);
  const double alpha = model.innovation.alpha;
  std::vector<Atom> atoms;
  for (const auto& [kappa, wk] : Signs(model.innovation)) {
    for (const auto& a : diagonal.atoms()) {
      if (a.seq.empty()) continue;
      atoms.push_back({NormalizedCanonicalForm(a.seq).Scaled(kappa),
                       a.weight * wk * std::pow(SupNorm(a.seq), alpha)});
    }
  }
  if (!(Total(atoms) > 0.0)) {
    throw Error(ErrorCode::kDegenerateModel, "coefficients vanish almost surely");
  }
  return {alpha, AtomicDist::FromUnnormalized(std::move(atoms)).dist};
}

double MaExtremalIndex(const MAStencilModel& model) {
  const double alpha = model.innovation.alpha;
  double norm = 0.0;
  const AtomicDist diagonal = DiagonalLaw(model);
  double c = 0.0;
  for (const auto& a : diagonal.atoms()) {
    norm += a.weight * std::pow(SupNorm(a.seq), alpha);
    c += a.weight * AlphaMass(a.seq, alpha);
  }
  if (!(c > 0.0)) throw Error(ErrorCode::kDegenerateModel, "tail constant is zero");
  return norm / c;
}

TailModel RandomizedOriginLimit(const MAStencilModel& model) {
  if (model.sharing == MarkSharing::kPerIndex) return MaSpectral(model);
  std::vector<Atom> mixture;
  for (const auto& row : EnumerateRows(model)) {
    std::vector<Atom> one = SpectralAtoms(
        {{LatticeSeq::FromDense(row.coef, 0), 1.0}}, model.innovation);
    const double c = Total(one);
    for (auto& a : one) mixture.push_back({std::move(a.seq), row.prob * a.weight / c});
  }
  return {model.innovation.alpha,
          AtomicDist::FromUnnormalized(std::move(mixture)).dist};
}

MAStencilModel MakeStencilModel(std::string name, InnovationSpec innovation,
                                std::vector<MarkLaw> marks,
                                const std::vector<std::string>& coefficients,
                                MarkSharing sharing,
                                const std::map<std::string, double>& params) {
  MAStencilModel model;
  model.name = std::move(name);
  model.innovation = innovation;
  model.marks = std::move(marks);
  model.sharing = sharing;
  const std::vector<std::string> names = MarkNames(model.marks);
  for (const auto& text : coefficients) {
    model.coefficients.push_back(Expr::Parse(text, params, names));
  }
  CheckModel(model);
  return model;
}

MAStencilModel ParseModelJson(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigError, std::string("model file: ") + e.what());
  }
  auto field = [](const json& obj, const char* key, const std::string& path) -> const json& {
    if (!obj.is_object() || !obj.contains(key)) {
      throw Error(ErrorCode::kConfigError, "missing field " + path + "." + key);
    }
    return obj.at(key);
  };
  auto number = [](const json& v, const std::string& path) {
    if (!v.is_number()) throw Error(ErrorCode::kConfigError, path + " must be a number");
    return v.get<double>();
  };
  try {
    InnovationSpec in;
    const json& innov = field(doc, "innovation", "$");
    in.alpha = number(field(innov, "alpha", "$.innovation"), "$.innovation.alpha");
    if (innov.contains("p")) in.p = number(innov.at("p"), "$.innovation.p");

    std::map<std::string, double> params;
    if (doc.contains("params")) {
      for (const auto& [k, v] : doc.at("params").items()) {
        params[k] = number(v, "$.params." + k);
      }
    }
    std::vector<MarkLaw> marks;
    if (doc.contains("marks")) {
      for (const auto& [k, v] : doc.at("marks").items()) {
        const std::string path = "$.marks." + k;
        if (!v.is_array()) throw Error(ErrorCode::kConfigError, path + " must be a list");
        MarkLaw law{k, {}, {}};
        for (std::size_t i = 0; i < v.size(); ++i) {
          const std::string ip = path + "[" + std::to_string(i) + "]";
          law.values.push_back(number(field(v[i], "value", ip), ip + ".value"));
          law.probs.push_back(number(field(v[i], "prob", ip), ip + ".prob"));
        }
        marks.push_back(std::move(law));
      }
    }
    const json& coef = field(doc, "coefficients", "$");
    if (!coef.is_array() || coef.empty()) {
      throw Error(ErrorCode::kConfigError, "$.coefficients must be a non-empty list");
    }
    std::vector<std::string> texts;
    for (std::size_t i = 0; i < coef.size(); ++i) {
      if (coef[i].is_number()) {
        texts.push_back(FormatDouble(coef[i].get<double>()));
      } else if (coef[i].is_string()) {
        texts.push_back(coef[i].get<std::string>());
      } else {
        throw Error(ErrorCode::kConfigError,
                    "$.coefficients[" + std::to_string(i) + "] must be a string");
      }
    }
    MarkSharing sharing = MarkSharing::kPerIndex;
    if (doc.contains("mark_sharing")) {
      const std::string s = doc.at("mark_sharing").get<std::string>();
      if (s == "global") {
        sharing = MarkSharing::kGlobal;
      } else if (s != "per_index") {
        throw Error(ErrorCode::kConfigError,
                    "$.mark_sharing must be per_index or global, got '" + s + "'");
      }
    }
    std::string name = doc.value("name", std::string("custom"));
    return MakeStencilModel(std::move(name), in, std::move(marks), texts, sharing, params);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigError, std::string("model file: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfigError) throw;
    throw Error(ErrorCode::kConfigError, e.what());
  }
}

std::string ModelFingerprint(const MAStencilModel& model) {
  json doc;
  doc["innovation"] = {{"alpha", model.innovation.alpha}, {"p", model.innovation.p}};
  json marks = json::object();
  for (const auto& m : model.marks) {
    json law = json::array();
    for (std::size_t i = 0; i < m.values.size(); ++i) {
      law.push_back({{"value", m.values[i]}, {"prob", m.probs[i]}});
    }
    marks[m.name] = law;
  }
  doc["marks"] = marks;
  // Rows pin down the constants folded into the expressions.
  json rows = json::array();
  for (const auto& row : EnumerateRows(model)) {
    rows.push_back({{"coef", row.coef}, {"prob", row.prob}});
  }
  doc["rows"] = rows;
  doc["mark_sharing"] = model.sharing == MarkSharing::kGlobal ? "global" : "per_index";
  return doc.dump();
}

std::vector<std::string> PresetNames() {
  return {"iid", "example-1.1", "example-5.1", "example-5.2", "three-lag-remark"};
}

MAStencilModel MakePreset(std::string_view name, const PresetParams& params) {
  const InnovationSpec in{params.alpha, params.p};
  const MarkLaw coin{"eps", {0.0, 1.0}, {0.5, 0.5}};
  if (name == "iid") {
    return MakeStencilModel("iid", in, {}, {"1"}, MarkSharing::kPerIndex);
  }
  if (name == "example-1.1") {
    return MakeStencilModel("example-1.1", in, {coin}, {"1", "eps"},
                            MarkSharing::kPerIndex);
  }
  if (name == "example-5.1") {
    if (!(params.b > 0.0)) throw Error(ErrorCode::kConfigError, "b must be positive");
    return MakeStencilModel("example-5.1", in, {coin}, {"1", "eps*b"},
                            MarkSharing::kPerIndex, {{"b", params.b}});
  }
  if (name == "example-5.2") {
    return MakeStencilModel("example-5.2", in, {coin}, {"1", "eps"},
                            MarkSharing::kGlobal);
  }
  if (name == "three-lag-remark") {
    return MakeStencilModel("three-lag-remark", in, {coin}, {"1", "eps", "eps"},
                            MarkSharing::kPerIndex);
  }
  throw Error(ErrorCode::kConfigError, "unknown preset '" + std::string(name) + "'");
}

}  // namespace tailproc
