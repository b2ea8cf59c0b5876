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
#include <vector>

#include "json.hpp"
#include "shredjoin/counters.hpp"
#include "shredjoin/database.hpp"
#include "shredjoin/nested_value.hpp"
#include "shredjoin/nsa_expr.hpp"
#include "shredjoin/planner.hpp"

namespace shredjoin {

/// True cardinalities of subplans and subexpressions.
class CardinalityOracle {
 public:
  virtual ~CardinalityOracle() = default;
  /// |result of p|
  virtual std::size_t plan_size(const BinaryPlan& p) = 0;
  /// Number of distinct `keys` projections of the result of p.
  virtual std::size_t plan_keys(const BinaryPlan& p, const std::vector<std::string>& keys) = 0;
  /// Cardinality of a relation-valued expression, or key count of a dictionary.
  virtual std::size_t expr_size(const NsaExpr& e) = 0;
};

/// Answers from the reference semantics; memoised per node.
class ReferenceCardinalities : public CardinalityOracle {
 public:
  explicit ReferenceCardinalities(InputResolver inputs, std::size_t cap = 1'000'000);
  std::size_t plan_size(const BinaryPlan& p) override;
  std::size_t plan_keys(const BinaryPlan& p, const std::vector<std::string>& keys) override;
  std::size_t expr_size(const NsaExpr& e) override;

 private:
  const FlatBag& plan_result(const BinaryPlan& p);

  InputResolver inputs_;
  std::size_t cap_;
  std::map<const PlanNode*, FlatBag> plans_;
  std::map<const NsaNode*, std::size_t> exprs_;
  // Memo keys are node addresses; holding the roots stops their reuse.
  std::vector<std::shared_ptr<const void>> pinned_;
};

/// Sum over joins of c_build(|P2|) + c_probe(|P1|, keys) + |attrs(P)| * c_gen(|P|).
double static_cost_binary(const BinaryPlan& p, CardinalityOracle& card,
                          const CostFunctions& f = CostFunctions::unit_linear());

/// groupby: c_build(|child|); semijoin: c_probe(|rel|, |dict|);
/// unnest and flatten: width(out) * c_gen(|out|); everything else is free.
double static_cost_nsa(const NsaExpr& e, CardinalityOracle& card,
                       const CostFunctions& f = CostFunctions::unit_linear());

/// {"events": [{"op", "kind", "size", "map_size"?}], "totals": {...}}
nlohmann::json counters_to_json(const Counters& c);

}  // namespace shredjoin
