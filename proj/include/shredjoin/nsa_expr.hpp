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

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "shredjoin/query.hpp"
#include "shredjoin/scheme.hpp"

namespace shredjoin {

enum class NsaOp {
  kInput,
  kSelect,
  kProject,
  kRename,
  kUnion,
  kDifference,
  kGroupBy,
  kNSemijoin,
  kUnnest,
  kFlatten,
};

struct NsaNode;
using NsaExpr = std::shared_ptr<const NsaNode>;

/// One node of an NSA expression tree. Which payload fields are meaningful
/// depends on `op`.
struct NsaNode {
  NsaOp op = NsaOp::kInput;
  Atom atom;                                  // kInput
  std::size_t leaf = 0;                       // kInput: atom position in the query
  Predicate predicate;                        // kSelect
  Scheme target;                              // kProject (kept scheme), kUnnest (Y)
  std::vector<std::string> keys;              // kGroupBy
  std::map<std::string, std::string> renaming;  // kRename
  std::vector<NsaExpr> children;
};

namespace nsa {
NsaExpr input(Atom atom, std::size_t leaf = 0);
NsaExpr select(NsaExpr e, Predicate predicate);
NsaExpr project(NsaExpr e, Scheme keep);
NsaExpr rename(NsaExpr e, std::map<std::string, std::string> renaming);
NsaExpr unite(NsaExpr a, NsaExpr b);
NsaExpr difference(NsaExpr a, NsaExpr b);
NsaExpr groupby(NsaExpr e, std::vector<std::string> keys);
NsaExpr nsemijoin(NsaExpr relation, NsaExpr dictionary);
NsaExpr unnest(NsaExpr e, Scheme nested);
NsaExpr flatten(NsaExpr e);
}  // namespace nsa

std::string to_string(const NsaExpr& e);
std::string to_string(NsaOp op);

/// Output of a relation-valued or dictionary-valued expression.
using SchemeOrDict = std::variant<Scheme, DictScheme>;

std::string to_string(const SchemeOrDict& s);

/// Assigns the scheme dictated by the NSA typing rules, or throws TypeError
/// naming the violated rule and the offending subexpression.
SchemeOrDict infer_scheme(const NsaExpr& e);
/// infer_scheme restricted to relation-valued expressions.
Scheme infer_relation_scheme(const NsaExpr& e);

/// Multi-line rendering with the inferred scheme next to every operator.
std::string annotate(const NsaExpr& e);

}  // namespace shredjoin
