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

// CSV tables and text formatting for experiment output. CSV values use the
// shortest round-trip representation so reruns are byte-identical.

#ifndef TAILPROC_REPORT_HPP_
#define TAILPROC_REPORT_HPP_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tailproc/atomic_dist.hpp"
#include "tailproc/experiments.hpp"

namespace tailproc {

// Six significant digits, for human-readable summaries.
std::string Sig6(double v);

// Quotes a field when it contains a comma, quote or newline.
std::string CsvField(std::string_view s);

// pattern_id,description,empirical_freq,exact_prob,z_score
std::string PatternCsv(const std::vector<PatternEntry>& rows);

// n,r_n,c_n,N_e,N_c,theta_hat,theta_exact
std::string EstimatorCsv(const std::vector<EstimatorRow>& rows);

// count,empirical_freq,poisson_pmf
std::string PoissonCsv(const std::vector<PoissonRow>& rows);

// weight,sequence
std::string AtomCsv(const AtomicDist& dist);

// Fixed-width text table of the pattern rows.
std::string PatternSummary(const std::vector<PatternEntry>& rows);

// Creates parent directories; throws kIoError.
void WriteTextFile(const std::filesystem::path& path, std::string_view content);

}  // namespace tailproc

#endif  // TAILPROC_REPORT_HPP_
