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

#include "tailproc/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "tailproc/error.hpp"

namespace tailproc {
namespace {

std::string Num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return FormatDouble(v);
}

}  // namespace

std::string Sig6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string CsvField(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string PatternCsv(const std::vector<PatternEntry>& rows) {
  std::string out = "pattern_id,description,empirical_freq,exact_prob,z_score\n";
  for (const auto& r : rows) {
    out += CsvField(r.id) + "," + CsvField(r.description) + "," + Num(r.empirical) + "," +
           Num(r.exact) + "," + Num(r.z()) + "\n";
  }
  return out;
}

std::string EstimatorCsv(const std::vector<EstimatorRow>& rows) {
  std::string out = "n,r_n,c_n,N_e,N_c,theta_hat,theta_exact\n";
  for (const auto& r : rows) {
    out += std::to_string(r.n) + "," + std::to_string(r.r_n) + "," + Num(r.c_n) + "," +
           std::to_string(r.n_exceedances) + "," + std::to_string(r.n_clusters) + "," +
           Num(r.theta_hat) + "," + Num(r.theta_exact) + "\n";
  }
  return out;
}

std::string PoissonCsv(const std::vector<PoissonRow>& rows) {
  std::string out = "count,empirical_freq,poisson_pmf\n";
  for (const auto& r : rows) {
    out += std::to_string(r.count) + "," + Num(r.empirical_freq) + "," + Num(r.poisson_pmf) + "\n";
  }
  return out;
}

std::string AtomCsv(const AtomicDist& dist) {
  std::string out = "weight,sequence\n";
  for (const auto& a : dist.atoms()) {
    out += Num(a.weight) + "," + CsvField(a.seq.ToString()) + "\n";
  }
  return out;
}

std::string PatternSummary(const std::vector<PatternEntry>& rows) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "  %-28s %12s %12s %9s\n", "pattern", "empirical", "exact", "z");
  out += buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "  %-28s %12s %12s %9s\n", r.description.c_str(),
                  Sig6(r.empirical).c_str(), Sig6(r.exact).c_str(), Sig6(r.z()).c_str());
    out += buf;
  }
  return out;
}

void WriteTextFile(const std::filesystem::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) {
    throw Error(ErrorCode::kIoError,
                "cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIoError, "cannot open " + path.string() + " for writing");
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

}  // namespace tailproc
