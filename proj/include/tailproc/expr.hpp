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

// Arithmetic expressions over named marks, used for stencil coefficients.
// Grammar: + - * / ^, unary minus, parentheses, numbers and identifiers.

#ifndef TAILPROC_EXPR_HPP_
#define TAILPROC_EXPR_HPP_

#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tailproc {

class Expr {
 public:
  // Identifiers found in `constants` are folded in; the others must appear in
  // `variables` and are read by position at evaluation time. Throws
  // kParseError.
  static Expr Parse(std::string_view text,
                    const std::map<std::string, double>& constants,
                    const std::vector<std::string>& variables);

  double Eval(std::span<const double> values) const;
  const std::string& text() const { return text_; }

  struct Node;

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace tailproc

#endif  // TAILPROC_EXPR_HPP_
