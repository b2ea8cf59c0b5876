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

#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "shredjoin/value.hpp"

namespace shredjoin {

/// A relation symbol applied to pairwise distinct attributes, e.g. R(x,y).
struct Atom {
  std::string relation;
  std::vector<std::string> attrs;

  std::string str() const;
  friend bool operator==(const Atom&, const Atom&) = default;
  friend auto operator<=>(const Atom&, const Atom&) = default;
};

enum class CmpOp { kEq, kNe, kLt, kLe, kGt, kGe };

std::string to_string(CmpOp op);

/// `attr op constant` or `attr op attr`.
struct Comparison {
  struct AttrRef {
    std::string name;
    friend bool operator==(const AttrRef&, const AttrRef&) = default;
  };

  std::string lhs;
  CmpOp op = CmpOp::kEq;
  std::variant<AttrRef, Value> rhs;

  std::vector<std::string> attributes() const;
  std::string str() const;
  friend bool operator==(const Comparison&, const Comparison&) = default;
};

/// A conjunction of comparisons; the empty conjunction is `true`.
struct Predicate {
  std::vector<Comparison> conjuncts;

  std::vector<std::string> attributes() const;
  bool is_true() const { return conjuncts.empty(); }
  /// `lookup` resolves an attribute name to the value of the current tuple.
  bool eval(const std::function<Value(const std::string&)>& lookup) const;
  std::string str() const;
  friend bool operator==(const Predicate&, const Predicate&) = default;
};

bool compare(const Value& a, CmpOp op, const Value& b);

/// A full conjunctive query R1(x1) ⋈ ... ⋈ Rk(xk), plus base-table filters.
struct JoinQuery {
  std::vector<Atom> atoms;
  std::vector<Comparison> filters;

  /// Attributes in order of first occurrence.
  std::vector<std::string> attrs() const;
  std::string str() const;
};

/// Parses `Q() :- R(x,y), S(y,z), z != 3.`; atoms and comparisons may be
/// mixed freely in the body. String constants are single-quoted.
JoinQuery parse_query(std::string_view text);
Atom parse_atom(std::string_view text);

}  // namespace shredjoin
