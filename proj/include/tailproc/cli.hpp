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

// Command-line experiment runner.

#ifndef TAILPROC_CLI_HPP_
#define TAILPROC_CLI_HPP_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace tailproc {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;       // configuration or I/O problem
inline constexpr int kExitValidation = 2;  // a model or check failed

struct CliOptions {
  std::string command;
  std::string preset;
  std::string model_file;
  double alpha = 1.2;
  double b = 1.0;
  double p = 1.0;
  std::int64_t n = 100'000;
  double r_exponent = 0.4;
  std::int64_t block_len = 0;
  std::optional<double> u_target;
  std::optional<double> threshold;
  double eps = 1.0;
  std::optional<std::int64_t> replicates;
  int window = 1;
  std::string anchor = "fm";
  std::optional<std::uint64_t> seed;
  int workers = 1;
  std::string out_dir;
  std::string format = "csv";
  std::string functional = "t-origin";
  std::vector<std::int64_t> schedule;
  double tol = 1e-10;
  std::string config;
};

std::vector<std::string> CommandNames();

// Runs a parsed command. Artifacts go to options.out_dir, or to
// $TAILPROC_OUT_DIR, or to ./tailproc_out.
int RunCommand(const CliOptions& options, std::ostream& out, std::ostream& err);

// Parses flags (and an optional --config JSON file whose keys are the flag
// names; flags win) and runs the command.
int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tailproc

#endif  // TAILPROC_CLI_HPP_
