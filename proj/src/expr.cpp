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

#include "tailproc/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include "tailproc/error.hpp"

namespace tailproc {

struct Expr::Node {
  enum Kind { kConst, kVar, kNeg, kAdd, kSub, kMul, kDiv, kPow } kind;
  double value = 0.0;
  std::size_t var = 0;
  std::shared_ptr<const Node> lhs, rhs;

  double Eval(std::span<const double> v) const {
    switch (kind) {
      case kConst: return value;
      case kVar: return v[var];
      case kNeg: return -lhs->Eval(v);
      case kAdd: return lhs->Eval(v) + rhs->Eval(v);
      case kSub: return lhs->Eval(v) - rhs->Eval(v);
      case kMul: return lhs->Eval(v) * rhs->Eval(v);
      case kDiv: return lhs->Eval(v) / rhs->Eval(v);
      case kPow: return std::pow(lhs->Eval(v), rhs->Eval(v));
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

class Parser {
 public:
  Parser(std::string_view text, const std::map<std::string, double>& constants,
         const std::vector<std::string>& variables)
      : text_(text), constants_(constants), variables_(variables) {}

  NodePtr Run() {
    NodePtr n = ParseSum();
    SkipSpace();
    if (pos_ != text_.size()) Fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void Fail(const std::string& what) const {
    throw Error(ErrorCode::kParseError, "expression '" + std::string(text_) +
                                            "' at " + std::to_string(pos_) +
                                            ": " + what);
  }

  void SkipSpace() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  bool Accept(char c) {
    SkipSpace();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  static NodePtr Binary(Expr::Node::Kind kind, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = kind;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
  }

  NodePtr ParseSum() {
    NodePtr n = ParseProduct();
    for (;;) {
      if (Accept('+')) {
        n = Binary(Expr::Node::kAdd, n, ParseProduct());
      } else if (Accept('-')) {
        n = Binary(Expr::Node::kSub, n, ParseProduct());
      } else {
        return n;
      }
    }
  }

  NodePtr ParseProduct() {
    NodePtr n = ParseUnary();
    for (;;) {
      if (Accept('*')) {
        n = Binary(Expr::Node::kMul, n, ParseUnary());
      } else if (Accept('/')) {
        n = Binary(Expr::Node::kDiv, n, ParseUnary());
      } else {
        return n;
      }
    }
  }

  NodePtr ParseUnary() {
    if (Accept('-')) {
      auto n = std::make_shared<Expr::Node>();
      n->kind = Expr::Node::kNeg;
      n->lhs = ParseUnary();
      return n;
    }
    if (Accept('+')) return ParseUnary();
    NodePtr base = ParseAtom();
    // Right associative; binds tighter than unary minus on its left.
    if (Accept('^')) return Binary(Expr::Node::kPow, base, ParseUnary());
    return base;
  }

  NodePtr ParseAtom() {
    SkipSpace();
    if (pos_ >= text_.size()) Fail("unexpected end");
    if (Accept('(')) {
      NodePtr n = ParseSum();
      if (!Accept(')')) Fail("missing ')'");
      return n;
    }
    const char c = text_[pos_];
    auto n = std::make_shared<Expr::Node>();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      auto [ptr, ec] = std::from_chars(text_.data() + pos_,
                                       text_.data() + text_.size(), n->value);
      if (ec != std::errc()) Fail("bad number");
      pos_ = static_cast<std::size_t>(ptr - text_.data());
      n->kind = Expr::Node::kConst;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      const std::string name(text_.substr(start, pos_ - start));
      if (auto it = constants_.find(name); it != constants_.end()) {
        n->kind = Expr::Node::kConst;
        n->value = it->second;
        return n;
      }
      auto it = std::find(variables_.begin(), variables_.end(), name);
      if (it == variables_.end()) Fail("unknown name '" + name + "'");
      n->kind = Expr::Node::kVar;
      n->var = static_cast<std::size_t>(it - variables_.begin());
      return n;
    }
    Fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view text_;
  const std::map<std::string, double>& constants_;
  const std::vector<std::string>& variables_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr Expr::Parse(std::string_view text,
                 const std::map<std::string, double>& constants,
                 const std::vector<std::string>& variables) {
  Expr e;
  e.text_ = std::string(text);
  e.root_ = Parser(text, constants, variables).Run();
  return e;
}

double Expr::Eval(std::span<const double> values) const {
  return root_->Eval(values);
}

}  // namespace tailproc
