// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "shredjoin/query.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "shredjoin/errors.hpp"
#include "shredjoin/scheme.hpp"

namespace shredjoin {

std::string Atom::str() const {
  std::string out = relation + "(";
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    if (i > 0) out += ",";
    out += attrs[i];
  }
  return out + ")";
}

std::string to_string(CmpOp op) {
  switch (op) {
    case CmpOp::kEq: return "=";
    case CmpOp::kNe: return "!=";
    case CmpOp::kLt: return "<";
    case CmpOp::kLe: return "<=";
    case CmpOp::kGt: return ">";
    case CmpOp::kGe: return ">=";
  }
  return "?";
}

namespace {

std::string literal(const Value& v) {
  if (kind_of(v) == ValueKind::kInt) return to_string(v);
  std::string out = "'";
  for (char c : std::get<std::string>(v)) {
    if (c == '\'') out += '\'';
    out += c;
  }
  return out + "'";
}

}  // namespace

std::vector<std::string> Comparison::attributes() const {
  std::vector<std::string> out{lhs};
  if (const auto* r = std::get_if<AttrRef>(&rhs)) {
    if (r->name != lhs) out.push_back(r->name);
  }
  return out;
}

std::string Comparison::str() const {
  std::string right;
  if (const auto* r = std::get_if<AttrRef>(&rhs)) {
    right = r->name;
  } else {
    right = literal(std::get<Value>(rhs));
  }
  return lhs + " " + to_string(op) + " " + right;
}

std::vector<std::string> Predicate::attributes() const {
  std::set<std::string> s;
  for (const auto& c : conjuncts)
    for (auto& a : c.attributes()) s.insert(a);
  return {s.begin(), s.end()};
}

bool Predicate::eval(const std::function<Value(const std::string&)>& lookup) const {
  for (const auto& c : conjuncts) {
    Value left = lookup(c.lhs);
    Value right = std::holds_alternative<Comparison::AttrRef>(c.rhs)
                      ? lookup(std::get<Comparison::AttrRef>(c.rhs).name)
                      : std::get<Value>(c.rhs);
    if (!compare(left, c.op, right)) return false;
  }
  return true;
}

std::string Predicate::str() const {
  if (conjuncts.empty()) return "true";
  std::string out;
  for (std::size_t i = 0; i < conjuncts.size(); ++i) {
    if (i > 0) out += " and ";
    out += conjuncts[i].str();
  }
  return out;
}

bool compare(const Value& a, CmpOp op, const Value& b) {
  if (a.index() != b.index()) return op == CmpOp::kNe;
  switch (op) {
    case CmpOp::kEq: return a == b;
    case CmpOp::kNe: return a != b;
    case CmpOp::kLt: return a < b;
    case CmpOp::kLe: return a <= b;
    case CmpOp::kGt: return a > b;
    case CmpOp::kGe: return a >= b;
  }
  return false;
}

std::vector<std::string> JoinQuery::attrs() const {
  std::vector<std::string> out;
  for (const auto& atom : atoms)
    for (const auto& a : atom.attrs)
      if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
  return out;
}

std::string JoinQuery::str() const {
  std::string out = "Q() :- ";
  bool first = true;
  for (const auto& a : atoms) {
    if (!first) out += ", ";
    out += a.str();
    first = false;
  }
  for (const auto& f : filters) {
    out += ", " + f.str();
  }
  return out + ".";
}

namespace {

class QueryParser {
 public:
  explicit QueryParser(std::string_view text) : text_(text) {}

  JoinQuery parse_query() {
    JoinQuery q;
    skip();
    // Optional head `Name(...) :-`.
    std::size_t save = pos_;
    if (is_ident_start(peek())) {
      ident();
      skip();
      if (peek() == '(') {
        skip_parens();
        skip();
        if (text_.substr(pos_, 2) == ":-") {
          pos_ += 2;
        } else {
          pos_ = save;
        }
      } else {
        pos_ = save;
      }
    }
    while (true) {
      skip();
      if (at_end() || peek() == '.') break;
      parse_item(q);
      skip();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      break;
    }
    skip();
    if (peek() == '.') ++pos_;
    skip();
    if (!at_end()) fail("unexpected '" + std::string(1, peek()) + "'");
    if (q.atoms.empty()) fail("query has no atoms");
    std::set<std::string> known;
    for (const auto& a : q.atoms) known.insert(a.attrs.begin(), a.attrs.end());
    for (const auto& f : q.filters)
      for (const auto& a : f.attributes())
        if (!known.count(a)) fail("filter attribute '" + a + "' does not occur in any atom");
    return q;
  }

  Atom parse_single_atom() {
    skip();
    Atom a = atom(ident());
    skip();
    if (!at_end()) fail("trailing characters after atom");
    return a;
  }

 private:
  void parse_item(JoinQuery& q) {
    std::string name = ident();
    skip();
    if (peek() == '(') {
      q.atoms.push_back(atom(std::move(name)));
      return;
    }
    Comparison c;
    c.lhs = std::move(name);
    c.op = cmp_op();
    skip();
    char ch = peek();
    if (ch == '\'') {
      c.rhs = Value(string_literal());
    } else if (ch == '-' || std::isdigit(static_cast<unsigned char>(ch))) {
      c.rhs = Value(int_literal());
    } else {
      c.rhs = Comparison::AttrRef{ident()};
    }
    q.filters.push_back(std::move(c));
  }

  Atom atom(std::string name) {
    Atom a;
    a.relation = std::move(name);
    skip();
    expect('(');
    skip();
    if (peek() != ')') {
      while (true) {
        skip();
        a.attrs.push_back(ident());
        skip();
        if (peek() == ',') {
          ++pos_;
          continue;
        }
        break;
      }
    }
    expect(')');
    std::set<std::string> seen;
    for (const auto& v : a.attrs) {
      if (!seen.insert(v).second) fail("attribute '" + v + "' repeated in atom " + a.str());
      if (v == kNxt) fail("attribute name 'nxt' is reserved");
    }
    return a;
  }

  CmpOp cmp_op() {
    skip();
    auto two = text_.substr(pos_, 2);
    if (two == "!=" || two == "<>") return pos_ += 2, CmpOp::kNe;
    if (two == "<=") return pos_ += 2, CmpOp::kLe;
    if (two == ">=") return pos_ += 2, CmpOp::kGe;
    if (two == "==") return pos_ += 2, CmpOp::kEq;
    char c = peek();
    if (c == '=') return ++pos_, CmpOp::kEq;
    if (c == '<') return ++pos_, CmpOp::kLt;
    if (c == '>') return ++pos_, CmpOp::kGt;
    fail("expected comparison operator");
  }

  std::string string_literal() {
    expect('\'');
    std::string out;
    while (true) {
      if (at_end()) fail("unterminated string literal");
      char c = text_[pos_++];
      if (c == '\'') {
        if (peek() == '\'') {
          out += '\'';
          ++pos_;
          continue;
        }
        return out;
      }
      out += c;
    }
  }

  std::int64_t int_literal() {
    std::size_t start = pos_;
    if (peek() == '-') ++pos_;
    while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    std::string digits(text_.substr(start, pos_ - start));
    if (digits.empty() || digits == "-") fail("expected integer");
    try {
      return std::stoll(digits);
    } catch (const std::exception&) {
      fail("integer out of range");
    }
  }

  std::string ident() {
    skip();
    if (!is_ident_start(peek())) fail("expected identifier");
    std::size_t start = pos_;
    while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  void skip_parens() {
    int depth = 0;
    do {
      if (at_end()) fail("unbalanced parentheses");
      char c = text_[pos_++];
      if (c == '(') ++depth;
      if (c == ')') --depth;
    } while (depth > 0);
  }

  static bool is_ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
  }
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }
  void skip() {
    while (!at_end()) {
      if (std::isspace(static_cast<unsigned char>(peek()))) {
        ++pos_;
      } else if (peek() == '#' || text_.substr(pos_, 2) == "--") {
        while (!at_end() && peek() != '\n') ++pos_;
      } else {
        break;
      }
    }
  }
  void expect(char c) {
    skip();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    std::size_t row = 1, col = 1;
    for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++row;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(msg, row, col);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

JoinQuery parse_query(std::string_view text) { return QueryParser(text).parse_query(); }

Atom parse_atom(std::string_view text) { return QueryParser(text).parse_single_atom(); }

}  // namespace shredjoin
