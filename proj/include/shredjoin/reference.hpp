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
#include <string>
#include <variant>
#include <vector>

#include "shredjoin/database.hpp"
#include "shredjoin/nested_value.hpp"
#include "shredjoin/nsa_expr.hpp"
#include "shredjoin/query.hpp"

namespace shredjoin::ref {

// Literal set-theoretic semantics of the nested semijoin algebra. Nested loops
// and ordered maps only; nothing here is meant to be fast.

NestedRelationValue from_physical(const PhysicalRelation& rel);

DictValue groupby(const NestedRelationValue& r, const std::vector<std::string>& keys);
NestedRelationValue nsemijoin(const NestedRelationValue& r, const DictValue& d);
NestedRelationValue unnest(const NestedRelationValue& r, const Scheme& nested);
NestedRelationValue flatten(const NestedRelationValue& r);
NestedRelationValue select(const NestedRelationValue& r, const Predicate& predicate);
NestedRelationValue project(const NestedRelationValue& r, const Scheme& keep);
NestedRelationValue rename(const NestedRelationValue& r,
                           const std::map<std::string, std::string>& renaming);
NestedRelationValue unite(const NestedRelationValue& a, const NestedRelationValue& b);
NestedRelationValue difference(const NestedRelationValue& a, const NestedRelationValue& b);

using RefValue = std::variant<NestedRelationValue, DictValue>;

RefValue eval(const NsaExpr& e, const InputResolver& inputs);
NestedRelationValue eval_relation(const NsaExpr& e, const InputResolver& inputs);

inline constexpr std::size_t kDefaultCap = 10'000;

/// Nested-loop evaluation of a (possibly cyclic) full join with exact bag
/// multiplicities. Filters are evaluated on complete tuples. Throws CapExceeded
/// once more than `cap` partial tuples have been produced.
FlatBag brute_force_join(const JoinQuery& q, const Database& db,
                         std::size_t cap = kDefaultCap);
/// Same over already-bound relations (one per atom, filters already applied).
FlatBag brute_force_join(const std::vector<Atom>& atoms,
                         const std::vector<PhysicalRelation>& bound,
                         std::size_t cap = kDefaultCap);

}  // namespace shredjoin::ref
