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

#include "tailproc/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "tailproc/calculus.hpp"
#include "tailproc/error.hpp"
#include "tailproc/experiments.hpp"
#include "tailproc/models.hpp"
#include "tailproc/report.hpp"
#include "tailproc/tail_sampling.hpp"

namespace tailproc {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string ReadFile(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIoError, "cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

bool EndsWith(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

bool IsStochastic(const std::string& command) {
  return command != "validate" && command != "derive" && command != "duality";
}

// Model source: a stencil model, or only a spectral law read from an .atoms
// file.
struct ModelSource {
  std::optional<MAStencilModel> stencil;
  TailModel spectral;
  std::string name;
};

ModelSource LoadModel(const CliOptions& o) {
  if (o.preset.empty() == o.model_file.empty()) {
    throw Error(ErrorCode::kConfigError, "give exactly one of --preset or --model-file");
  }
  ModelSource src;
  if (!o.preset.empty()) {
    src.stencil = MakePreset(o.preset, {o.alpha, o.p, o.b});
    src.name = o.preset;
  } else if (EndsWith(o.model_file, ".atoms")) {
    src.spectral = {o.alpha, ParseAtomicDist(ReadFile(o.model_file))};
    src.name = o.model_file;
    return src;
  } else {
    src.stencil = ParseModelJson(ReadFile(o.model_file));
    src.name = o.model_file;
  }
  src.spectral = MaSpectral(*src.stencil);
  return src;
}

const MAStencilModel& RequireStencil(const ModelSource& src) {
  if (!src.stencil) {
    throw Error(ErrorCode::kConfigError,
                "simulation needs a stencil model (--preset or a .json model file)");
  }
  return *src.stencil;
}

Anchor ParseAnchor(const std::string& s) {
  if (s == "fe") return Anchor::kFirstExceedance;
  if (s == "fm") return Anchor::kFirstMaximum;
  throw Error(ErrorCode::kConfigError, "--anchor must be fe or fm, got '" + s + "'");
}

double DefaultUTarget(const std::string& command) {
  if (command == "poisson") return 1.0;
  if (command == "randomized-origin" || command == "randomized-cluster") return 10.0;
  if (command == "campbell") return 2.0;
  if (command == "estimators") return 100.0;
  return 1000.0;
}

std::int64_t DefaultReplicates(const std::string& command) {
  if (command == "campbell") return 10'000;
  if (command == "simulate-clusters" || command == "estimators") return 1;
  return 2000;
}

PathConfig MakePathConfig(const CliOptions& o) {
  PathConfig cfg;
  cfg.n = o.n;
  cfg.r_exponent = o.r_exponent;
  cfg.block_len = o.block_len;
  cfg.u_target = o.u_target.value_or(DefaultUTarget(o.command));
  cfg.threshold = o.threshold;
  cfg.half_width = o.window;
  cfg.seed = *o.seed;
  cfg.workers = o.workers;
  return cfg;
}

json ThresholdJson(const Threshold& t) {
  return {{"c_n", t.value},
          {"tail_prob_rel_sigma", t.rel_sigma},
          {"pilot_size", t.pilot_size},
          {"extrapolated", t.extrapolated}};
}

json OptionsJson(const CliOptions& o) {
  json j;
  j["command"] = o.command;
  if (!o.preset.empty()) j["preset"] = o.preset;
  if (!o.model_file.empty()) j["model-file"] = o.model_file;
  j["alpha"] = o.alpha;
  j["b"] = o.b;
  j["p"] = o.p;
  j["n"] = o.n;
  j["r-exponent"] = o.r_exponent;
  if (o.block_len > 0) j["block-len"] = o.block_len;
  j["u-target"] = o.u_target.value_or(DefaultUTarget(o.command));
  if (o.threshold) j["threshold"] = *o.threshold;
  j["eps"] = o.eps;
  j["replicates"] = o.replicates.value_or(DefaultReplicates(o.command));
  j["window"] = o.window;
  j["anchor"] = o.anchor;
  if (o.seed) j["seed"] = *o.seed;
  j["workers"] = o.workers;
  j["format"] = o.format;
  j["functional"] = o.functional;
  if (!o.schedule.empty()) j["schedule"] = o.schedule;
  j["tol"] = o.tol;
  return j;
}

json PatternJson(const std::vector<PatternEntry>& rows) {
  json a = json::array();
  for (const auto& r : rows) {
    a.push_back({{"pattern_id", r.id},
                 {"description", r.description},
                 {"empirical_freq", r.empirical},
                 {"exact_prob", r.exact},
                 {"z_score", std::isfinite(r.z()) ? json(r.z()) : json(nullptr)}});
  }
  return a;
}

json AtomsJson(const AtomicDist& d) {
  json a = json::array();
  for (const auto& atom : d.atoms()) {
    a.push_back({{"weight", atom.weight}, {"sequence", atom.seq.ToString()}});
  }
  return a;
}

std::vector<PatternEntry> CellsToEntries(const std::string& prefix, const std::vector<Cell>& cells) {
  std::vector<PatternEntry> rows;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    rows.push_back({prefix + std::to_string(i), prefix + ": " + cells[i].label,
                    cells[i].empirical, cells[i].exact, cells[i].sigma});
  }
  return rows;
}

void PrintAtoms(std::ostream& out, const std::string& title, const AtomicDist& d) {
  out << title << " (" << d.size() << " atoms)\n";
  for (const auto& a : d.atoms()) {
    out << "  " << Sig6(a.weight) << "  " << a.seq.ToString() << "\n";
  }
}

class Runner {
 public:
  Runner(const CliOptions& o, std::ostream& out) : o_(o), out_(out) {
    if (!o.out_dir.empty()) {
      dir_ = o.out_dir;
    } else if (const char* env = std::getenv("TAILPROC_OUT_DIR"); env && *env) {
      dir_ = env;
    } else {
      dir_ = "tailproc_out";
    }
  }

  int Run() {
    const auto start = std::chrono::steady_clock::now();
    if (o_.format != "csv" && o_.format != "json") {
      throw Error(ErrorCode::kConfigError, "--format must be csv or json");
    }
    if (IsStochastic(o_.command) && !o_.seed) {
      throw Error(ErrorCode::kConfigError, o_.command + " needs an explicit --seed");
    }
    static const std::map<std::string, int (Runner::*)()> kCommands = {
        {"validate", &Runner::Validate},
        {"derive", &Runner::Derive},
        {"duality", &Runner::Duality},
        {"simulate-tail", &Runner::SimulateTail},
        {"simulate-clusters", &Runner::SimulateClusters},
        {"poisson", &Runner::Poisson},
        {"randomized-origin", &Runner::RandomizedOrigin},
        {"randomized-cluster", &Runner::RandomizedCluster},
        {"campbell", &Runner::Campbell},
        {"estimators", &Runner::Estimators},
    };
    auto it = kCommands.find(o_.command);
    if (it == kCommands.end()) {
      throw Error(ErrorCode::kConfigError, "unknown command '" + o_.command + "'");
    }
    src_ = LoadModel(o_);
    const int code = (this->*(it->second))();
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json summary;
    summary["config"] = OptionsJson(o_);
    summary["model"] = src_.name;
    if (o_.seed) summary["seed"] = *o_.seed;
    summary["runtime_seconds"] = seconds;
    summary["exit_code"] = code;
    summary["results"] = results_;
    WriteTextFile(dir_ / (o_.command + "_summary.json"), summary.dump(2) + "\n");
    return code;
  }

 private:
  void WriteTable(const std::string& stem, const std::string& csv, const json& rows) {
    if (o_.format == "csv") {
      WriteTextFile(dir_ / (stem + ".csv"), csv);
    } else {
      WriteTextFile(dir_ / (stem + ".json"), rows.dump(2) + "\n");
    }
  }

  int Validate() {
    const TcfReport tcf = TcfCheck(src_.spectral, std::nullopt, o_.tol);
    const TcfReport mecke = MeckeCheck(src_.spectral, o_.tol);
    results_["tcf_valid"] = tcf.valid;
    results_["tcf_max_violation"] = tcf.max_violation;
    results_["mecke_valid"] = mecke.valid;
    if (!tcf.valid) {
      const auto& w = *tcf.witness;
      out_ << "invalid: time-change formula fails at k = " << w.k << " for atom "
           << w.atom.ToString() << " (left mass " << Sig6(w.left_mass) << ", right mass "
           << Sig6(w.right_mass) << ")\n";
      results_["witness"] = {{"k", w.k}, {"atom", w.atom.ToString()},
                             {"left", w.left_mass}, {"right", w.right_mass}};
      return kExitValidation;
    }
    const double theta = ExtremalIndexSpectral(src_.spectral);
    results_["theta"] = theta;
    out_ << "valid spectral tail process; theta = " << Sig6(theta) << "\n";
    if (mecke.valid != tcf.valid) {
      out_ << "warning: summed form disagrees with the per-lag check\n";
      return kExitValidation;
    }
    return kExitOk;
  }

  int Derive() {
    const TailModel& spec = src_.spectral;
    CheckTailModel(spec);
    const AnchoredModel q = src_.stencil ? MaAnchored(*src_.stencil) : AnchoredFromSpectral(spec);
    if (src_.stencil) {
      const AtomicDist diag = DiagonalLaw(*src_.stencil);
      PrintAtoms(out_, "diagonal coefficients C", diag);
      results_["diagonal"] = AtomsJson(diag);
      WriteTable("derive_diagonal", AtomCsv(diag), AtomsJson(diag));
      results_["tail_constant"] = TailConstant(*src_.stencil);
      out_ << "tail constant c = " << Sig6(TailConstant(*src_.stencil)) << "\n";
    }
    PrintAtoms(out_, "spectral tail process Theta", spec.spectral);
    PrintAtoms(out_, "anchored spectral process Q", q.q);
    const double t1 = ExtremalIndexSpectral(spec);
    const double t2 = ExtremalIndexInverseCount(spec);
    const double t3 = 1.0 / MeanAlphaMass(q);
    out_ << "theta = " << Sig6(t1) << " (inverse count " << Sig6(t2) << ", 1/E sum|Q_k|^alpha "
         << Sig6(t3);
    results_["theta_spectral"] = t1;
    results_["theta_inverse_count"] = t2;
    results_["theta_mean_alpha_mass"] = t3;
    if (src_.stencil) {
      const double t4 = MaExtremalIndex(*src_.stencil);
      out_ << ", coefficient ratio " << Sig6(t4);
      results_["theta_coefficients"] = t4;
    }
    out_ << ")\n";
    results_["spectral"] = AtomsJson(spec.spectral);
    results_["anchored"] = AtomsJson(q.q);
    WriteTable("derive_spectral", AtomCsv(spec.spectral), AtomsJson(spec.spectral));
    WriteTable("derive_anchored", AtomCsv(q.q), AtomsJson(q.q));
    return kExitOk;
  }

  int Duality() {
    const TailModel& spec = src_.spectral;
    const TcfReport tcf = TcfCheck(spec, std::nullopt, o_.tol);
    const AnchoredModel q = AnchoredFromSpectral(spec);
    const TailModel back = SpectralFromAnchored(q);
    const TailModel rs = RsTransform(spec);
    const double round_trip = spec.spectral.MaxWeightDifference(back.spectral);
    const double rs_gap = spec.spectral.MaxWeightDifference(rs.spectral);
    const double t1 = ExtremalIndexSpectral(spec);
    const double t2 = ExtremalIndexInverseCount(spec);
    const double t3 = 1.0 / MeanAlphaMass(q);
    const double theta_gap = std::max(std::abs(t1 - t2), std::abs(t1 - t3));
    bool ok = tcf.valid && round_trip <= 1e-12 && rs_gap <= 1e-12 && theta_gap <= 1e-10;
    out_ << "time-change formula: " << (tcf.valid ? "holds" : "fails") << "\n"
         << "anchored -> spectral round trip: max weight gap " << Sig6(round_trip) << "\n"
         << "RS-transform fixed point: max weight gap " << Sig6(rs_gap) << "\n"
         << "theta: " << Sig6(t1) << " / " << Sig6(t2) << " / " << Sig6(t3) << "\n";
    results_["tcf_valid"] = tcf.valid;
    results_["round_trip_gap"] = round_trip;
    results_["rs_gap"] = rs_gap;
    results_["theta"] = {t1, t2, t3};

    if (o_.seed) {
      SamplingOptions so;
      so.n_samples = o_.n;
      so.seed = *o_.seed;
      so.workers = o_.workers;
      so.half_width = std::max(1, o_.window);
      std::vector<PatternEntry> rows;
      auto add = [&](const std::string& name, const McReport& r) {
        auto e = CellsToEntries(name, r.cells);
        rows.insert(rows.end(), e.begin(), e.end());
        out_ << name << ": max |z| " << Sig6(r.max_abs_z()) << " (critical " << Sig6(r.critical_z)
             << ")" << (r.consistent() ? "" : "  INCONSISTENT") << "\n";
        results_["mc"][name] = {{"max_abs_z", r.max_abs_z()},
                                {"critical_z", r.critical_z},
                                {"consistent", r.consistent()}};
        ok = ok && r.consistent();
      };
      add("stationarity-cyclic", ExceedanceStationarityMc(spec, CyclicMap(1), so));
      add("stationarity-nearest", ExceedanceStationarityMc(spec, NearestMap(), so));
      add("anchored-fe", AnchoredLawFromTailMc(spec, Anchor::kFirstExceedance, so));
      add("anchored-fm", AnchoredLawFromTailMc(spec, Anchor::kFirstMaximum, so));
      add("size-biased", SizeBiasedTailFromAnchoredMc(q, so));
      WriteTable("duality", PatternCsv(rows), PatternJson(rows));
    }
    out_ << (ok ? "duality checks pass\n" : "duality checks FAIL\n");
    return ok ? kExitOk : kExitValidation;
  }

  void ReportPatterns(const std::string& stem, const std::vector<PatternEntry>& rows) {
    out_ << PatternSummary(rows);
    results_["patterns"] = PatternJson(rows);
    WriteTable(stem, PatternCsv(rows), PatternJson(rows));
  }

  int SimulateTail() {
    const auto r = EmpiricalTailProcess(RequireStencil(src_), MakePathConfig(o_));
    out_ << "c_n = " << Sig6(r.threshold.value) << ", exceedances N_e = " << r.n_exceedances
         << "\n";
    results_["threshold"] = ThresholdJson(r.threshold);
    results_["n_exceedances"] = r.n_exceedances;
    results_["magnitudes"] = PatternJson(r.magnitudes);
    ReportPatterns("simulate-tail", r.patterns);
    return kExitOk;
  }

  int SimulateClusters() {
    const MAStencilModel& model = RequireStencil(src_);
    const PathConfig cfg = MakePathConfig(o_);
    const auto r = ExtractClusterExperiment(
        model, cfg, ParseAnchor(o_.anchor), o_.replicates.value_or(DefaultReplicates(o_.command)));
    out_ << "c_n = " << Sig6(r.threshold.value) << ", r_n = " << r.block_len
         << ", N_e = " << r.stats.n_exceedances << ", N_c = " << r.stats.n_clusters << "\n"
         << "theta: N_c/N_e = " << Sig6(r.theta_ratio) << " +- " << Sig6(r.theta_ratio_sigma)
         << ", cluster count = " << Sig6(r.theta_clusters) << " +- "
         << Sig6(r.theta_clusters_sigma) << ", exact = " << Sig6(r.theta_exact) << "\n";
    results_["threshold"] = ThresholdJson(r.threshold);
    results_["theta_ratio"] = r.theta_ratio;
    results_["theta_ratio_sigma"] = r.theta_ratio_sigma;
    results_["theta_clusters"] = r.theta_clusters;
    results_["theta_clusters_sigma"] = r.theta_clusters_sigma;
    results_["theta_exact"] = r.theta_exact;
    json hist = json::object();
    for (const auto& [size, count] : r.stats.size_histogram) hist[std::to_string(size)] = count;
    results_["cluster_sizes"] = hist;
    ReportPatterns("simulate-clusters", r.atoms);
    const EstimatorRow row{cfg.n, r.block_len, r.threshold.value, r.stats.n_exceedances,
                           r.stats.n_clusters, r.theta_ratio, r.theta_exact, 0.0, 0.0};
    WriteTable("simulate-clusters_estimators", EstimatorCsv({row}), results_["theta_ratio"]);
    return kExitOk;
  }

  int Poisson() {
    const auto r = PoissonClusterExperiment(RequireStencil(src_), MakePathConfig(o_), o_.eps,
                                            o_.replicates.value_or(DefaultReplicates(o_.command)));
    out_ << "replicates " << r.replicates << ", lambda = " << Sig6(r.lambda) << "\n"
         << "mean " << Sig6(r.mean) << " +- " << Sig6(r.mean_sigma) << ", variance/mean "
         << Sig6(r.dispersion) << "\n"
         << "chi-square " << Sig6(r.chi_square.statistic) << " on " << r.chi_square.dof
         << " dof, p = " << Sig6(r.chi_square.p_value) << "\n";
    results_["threshold"] = ThresholdJson(r.threshold);
    results_["lambda"] = r.lambda;
    results_["mean"] = r.mean;
    results_["mean_sigma"] = r.mean_sigma;
    results_["variance"] = r.variance;
    results_["dispersion"] = r.dispersion;
    results_["chi_square"] = {{"statistic", r.chi_square.statistic},
                              {"dof", r.chi_square.dof},
                              {"p_value", r.chi_square.p_value}};
    json rows = json::array();
    for (const auto& row : r.rows) {
      rows.push_back({{"count", row.count}, {"empirical_freq", row.empirical_freq},
                      {"poisson_pmf", row.poisson_pmf}});
    }
    WriteTable("poisson", PoissonCsv(r.rows), rows);
    return kExitOk;
  }

  int Randomized(const RandomizedResult& r, const std::string& stem) {
    out_ << "c_n = " << Sig6(r.threshold.value) << ", sampled " << r.samples << " of "
         << r.paths << " paths\n"
         << "total variation to the limit law " << Sig6(r.tv_to_limit)
         << ", to the tail process " << Sig6(r.tv_to_tail) << "\n";
    results_["threshold"] = ThresholdJson(r.threshold);
    results_["samples"] = r.samples;
    results_["tv_to_limit"] = r.tv_to_limit;
    results_["tv_to_tail"] = r.tv_to_tail;
    ReportPatterns(stem, r.patterns);
    return kExitOk;
  }

  int RandomizedOrigin() {
    return Randomized(
        RandomizedOriginExperiment(RequireStencil(src_), MakePathConfig(o_),
                                   o_.replicates.value_or(DefaultReplicates(o_.command))),
        "randomized-origin");
  }

  int RandomizedCluster() {
    return Randomized(
        RandomizedClusterExperiment(RequireStencil(src_), MakePathConfig(o_),
                                    ParseAnchor(o_.anchor),
                                    o_.replicates.value_or(DefaultReplicates(o_.command))),
        "randomized-cluster");
  }

  int Campbell() {
    const auto r = CampbellCheck(RequireStencil(src_), MakePathConfig(o_),
                                 ParseCampbellFunctional(o_.functional),
                                 o_.replicates.value_or(DefaultReplicates(o_.command)));
    const double z = r.lhs_sigma > 0.0 ? (r.lhs - r.rhs) / r.lhs_sigma : 0.0;
    out_ << "functional " << r.functional << ": lhs " << Sig6(r.lhs) << " +- "
         << Sig6(r.lhs_sigma) << ", exact rhs " << Sig6(r.rhs) << ", z = " << Sig6(z) << "\n";
    results_["threshold"] = ThresholdJson(r.threshold);
    results_["lhs"] = r.lhs;
    results_["lhs_sigma"] = r.lhs_sigma;
    results_["rhs"] = r.rhs;
    const std::vector<PatternEntry> rows = {
        {"f0", "campbell " + r.functional, r.lhs, r.rhs, r.lhs_sigma}};
    WriteTable("campbell", PatternCsv(rows), PatternJson(rows));
    return kExitOk;
  }

  int Estimators() {
    std::vector<std::int64_t> schedule = o_.schedule;
    if (schedule.empty()) schedule = {10'000, 100'000, 1'000'000};
    const auto rows = EstimatorConvergence(RequireStencil(src_), MakePathConfig(o_), schedule);
    json arr = json::array();
    char buf[160];
    std::snprintf(buf, sizeof(buf), "  %10s %6s %12s %8s %8s %10s %10s %10s\n", "n", "r_n",
                  "c_n", "N_e", "N_c", "theta_hat", "N_e ratio", "N_c ratio");
    out_ << buf;
    for (const auto& r : rows) {
      std::snprintf(buf, sizeof(buf), "  %10lld %6lld %12s %8lld %8lld %10s %10s %10s\n",
                    static_cast<long long>(r.n), static_cast<long long>(r.r_n),
                    Sig6(r.c_n).c_str(), static_cast<long long>(r.n_exceedances),
                    static_cast<long long>(r.n_clusters), Sig6(r.theta_hat).c_str(),
                    Sig6(r.exceedance_ratio).c_str(), Sig6(r.cluster_ratio).c_str());
      out_ << buf;
      arr.push_back({{"n", r.n}, {"r_n", r.r_n}, {"c_n", r.c_n}, {"N_e", r.n_exceedances},
                     {"N_c", r.n_clusters}, {"theta_hat", r.theta_hat},
                     {"theta_exact", r.theta_exact}, {"exceedance_ratio", r.exceedance_ratio},
                     {"cluster_ratio", r.cluster_ratio}});
    }
    if (!rows.empty()) out_ << "theta exact = " << Sig6(rows.front().theta_exact) << "\n";
    results_["table"] = arr;
    WriteTable("estimators", EstimatorCsv(rows), arr);
    return kExitOk;
  }

  const CliOptions& o_;
  std::ostream& out_;
  fs::path dir_;
  ModelSource src_;
  json results_ = json::object();
};

// Setters for --config keys, named like the flags.
void ApplyConfig(const json& cfg, CliOptions& o, const std::map<std::string, bool>& given) {
  if (!cfg.is_object()) throw Error(ErrorCode::kConfigError, "config must be a JSON object");
  using Setter = std::function<void(const json&)>;
  const std::map<std::string, Setter> setters = {
      {"preset", [&](const json& v) { o.preset = v.get<std::string>(); }},
      {"model-file", [&](const json& v) { o.model_file = v.get<std::string>(); }},
      {"alpha", [&](const json& v) { o.alpha = v.get<double>(); }},
      {"b", [&](const json& v) { o.b = v.get<double>(); }},
      {"p", [&](const json& v) { o.p = v.get<double>(); }},
      {"n", [&](const json& v) { o.n = v.get<std::int64_t>(); }},
      {"r-exponent", [&](const json& v) { o.r_exponent = v.get<double>(); }},
      {"block-len", [&](const json& v) { o.block_len = v.get<std::int64_t>(); }},
      {"u-target", [&](const json& v) { o.u_target = v.get<double>(); }},
      {"threshold", [&](const json& v) { o.threshold = v.get<double>(); }},
      {"eps", [&](const json& v) { o.eps = v.get<double>(); }},
      {"replicates", [&](const json& v) { o.replicates = v.get<std::int64_t>(); }},
      {"window", [&](const json& v) { o.window = v.get<int>(); }},
      {"anchor", [&](const json& v) { o.anchor = v.get<std::string>(); }},
      {"seed", [&](const json& v) { o.seed = v.get<std::uint64_t>(); }},
      {"workers", [&](const json& v) { o.workers = v.get<int>(); }},
      {"out-dir", [&](const json& v) { o.out_dir = v.get<std::string>(); }},
      {"format", [&](const json& v) { o.format = v.get<std::string>(); }},
      {"functional", [&](const json& v) { o.functional = v.get<std::string>(); }},
      {"schedule", [&](const json& v) { o.schedule = v.get<std::vector<std::int64_t>>(); }},
      {"tol", [&](const json& v) { o.tol = v.get<double>(); }},
  };
  for (const auto& [key, value] : cfg.items()) {
    auto it = setters.find(key);
    if (it == setters.end()) throw Error(ErrorCode::kConfigError, "config: unknown key '" + key + "'");
    if (auto g = given.find(key); g != given.end() && g->second) continue;
    try {
      it->second(value);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kConfigError, "config: bad value for '" + key + "': " + e.what());
    }
  }
}

}  // namespace

std::vector<std::string> CommandNames() {
  return {"validate",          "derive",  "duality",           "simulate-tail",
          "simulate-clusters", "poisson", "randomized-origin", "randomized-cluster",
          "campbell",          "estimators"};
}

int RunCommand(const CliOptions& options, std::ostream& out, std::ostream& err) {
  try {
    return Runner(options, out).Run();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::kInvalidDistribution:
      case ErrorCode::kMalformedModel:
      case ErrorCode::kDegenerateModel:
        return kExitValidation;
      default:
        return kExitError;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact tail-process calculus and cluster simulations for moving averages",
               "tailproc"};
  app.require_subcommand(1);
  CliOptions o;
  std::map<std::string, std::vector<CLI::Option*>> flags;
  auto add = [&](CLI::App* sub) {
    auto reg = [&](const std::string& key, CLI::Option* opt) { flags[key].push_back(opt); };
    reg("preset", sub->add_option("--preset", o.preset, "named model: iid, example-1.1, "
                                                        "example-5.1, example-5.2, three-lag-remark"));
    reg("model-file", sub->add_option("--model-file", o.model_file,
                                      "stencil model (.json) or spectral law (.atoms)"));
    reg("alpha", sub->add_option("--alpha", o.alpha, "tail index"));
    reg("b", sub->add_option("--b", o.b, "second coefficient of example-5.1"));
    reg("p", sub->add_option("--p", o.p, "probability of a positive innovation"));
    reg("n", sub->add_option("--n", o.n, "path length (or sample count for duality)"));
    reg("r-exponent", sub->add_option("--r-exponent", o.r_exponent, "block length n^r"));
    reg("block-len", sub->add_option("--block-len", o.block_len, "explicit block length"));
    reg("u-target", sub->add_option("--u-target", o.u_target, "expected exceedances n P(|X|>c_n)"));
    reg("threshold", sub->add_option("--threshold", o.threshold, "explicit threshold c_n"));
    reg("eps", sub->add_option("--eps", o.eps, "threshold multiplier for poisson"));
    reg("replicates", sub->add_option("--replicates", o.replicates, "number of paths"));
    reg("window", sub->add_option("--window", o.window, "pattern window half width"));
    reg("anchor", sub->add_option("--anchor", o.anchor, "fe or fm"));
    reg("seed", sub->add_option("--seed", o.seed, "random seed (required for simulations)"));
    reg("workers", sub->add_option("--workers", o.workers, "worker threads"));
    reg("out-dir", sub->add_option("--out-dir", o.out_dir, "artifact directory"));
    reg("format", sub->add_option("--format", o.format, "csv or json"));
    reg("functional", sub->add_option("--functional", o.functional,
                                      "campbell functional: one, t-origin, next-exceeds"));
    reg("schedule", sub->add_option("--schedule", o.schedule, "path lengths for estimators"));
    reg("tol", sub->add_option("--tol", o.tol, "tolerance of the time-change check"));
    sub->add_option("--config", o.config, "JSON file with the same keys as the flags");
  };
  for (const auto& name : CommandNames()) {
    CLI::App* sub = app.add_subcommand(name);
    add(sub);
    sub->callback([&o, name] { o.command = name; });
  }
  try {
    std::vector<std::string> args;
    for (int i = argc - 1; i >= 1; --i) args.emplace_back(argv[i]);
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  if (!o.config.empty()) {
    std::map<std::string, bool> given;
    for (const auto& [key, opts] : flags) {
      bool any = false;
      for (auto* opt : opts) any = any || opt->count() > 0;
      given[key] = any;
    }
    try {
      std::ifstream f(o.config);
      if (!f) throw Error(ErrorCode::kIoError, "cannot read config " + o.config);
      json cfg;
      try {
        cfg = json::parse(f);
      } catch (const json::exception& e) {
        throw Error(ErrorCode::kConfigError, "config " + o.config + ": " + e.what());
      }
      ApplyConfig(cfg, o, given);
    } catch (const Error& e) {
      err << "error: " << e.what() << "\n";
      return kExitError;
    }
  }
  return RunCommand(o, out, err);
}

}  // namespace tailproc
