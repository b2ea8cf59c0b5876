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

#include "shredjoin/cost.hpp"

#include <set>

#include "shredjoin/reference.hpp"

namespace shredjoin {

ReferenceCardinalities::ReferenceCardinalities(InputResolver inputs, std::size_t cap)
    : inputs_(std::move(inputs)), cap_(cap) {}

const FlatBag& ReferenceCardinalities::plan_result(const BinaryPlan& p) {
  auto it = plans_.find(p.get());
  if (it != plans_.end()) return it->second;
  pinned_.push_back(p);
  std::vector<Atom> atoms;
  std::vector<PhysicalRelation> bound;
  for (const auto* l : leaves(p)) {
    atoms.push_back(l->atom);
    bound.push_back(inputs_(l->atom, l->leaf));
  }
  return plans_.emplace(p.get(), ref::brute_force_join(atoms, bound, cap_)).first->second;
}

std::size_t ReferenceCardinalities::plan_size(const BinaryPlan& p) { return plan_result(p).size(); }

std::size_t ReferenceCardinalities::plan_keys(const BinaryPlan& p, const std::vector<std::string>& keys) {
  const FlatBag& bag = plan_result(p);
  std::vector<std::size_t> idx;
  for (const auto& k : keys)
    for (std::size_t i = 0; i < bag.attrs.size(); ++i)
      if (bag.attrs[i] == k) idx.push_back(i);
  std::set<KeyTuple> distinct;
  for (const auto& row : bag.rows) {
    KeyTuple t;
    for (std::size_t i : idx) t.push_back(row[i]);
    distinct.insert(std::move(t));
  }
  return distinct.size();
}

std::size_t ReferenceCardinalities::expr_size(const NsaExpr& e) {
  auto it = exprs_.find(e.get());
  if (it != exprs_.end()) return it->second;
  pinned_.push_back(e);
  ref::RefValue v = ref::eval(e, inputs_);
  std::size_t n = std::visit([](const auto& x) { return x.size(); }, v);
  exprs_.emplace(e.get(), n);
  return n;
}

double static_cost_binary(const BinaryPlan& p, CardinalityOracle& card, const CostFunctions& f) {
  if (p->is_leaf()) return 0.0;
  double cost = static_cost_binary(p->left, card, f) + static_cost_binary(p->right, card, f);
  cost += f.build(card.plan_size(p->right));
  cost += f.probe(card.plan_size(p->left), card.plan_keys(p->right, ja(p)));
  cost += static_cast<double>(attrs(p).size()) * f.gen(card.plan_size(p));
  return cost;
}

double static_cost_nsa(const NsaExpr& e, CardinalityOracle& card, const CostFunctions& f) {
  double cost = 0.0;
  for (const auto& c : e->children) cost += static_cost_nsa(c, card, f);
  switch (e->op) {
    case NsaOp::kGroupBy:
      cost += f.build(card.expr_size(e->children[0]));
      break;
    case NsaOp::kNSemijoin:
      cost += f.probe(card.expr_size(e->children[0]), card.expr_size(e->children[1]));
      break;
    case NsaOp::kUnnest:
    case NsaOp::kFlatten:
      cost += static_cast<double>(infer_relation_scheme(e).width()) * f.gen(card.expr_size(e));
      break;
    default:
      break;
  }
  return cost;
}

nlohmann::json counters_to_json(const Counters& c) {
  nlohmann::json events = nlohmann::json::array();
  for (const auto& e : c.events()) {
    nlohmann::json j;
    j["op"] = e.op;
    switch (e.kind) {
      case Counters::Kind::kBuild: j["kind"] = "build"; break;
      case Counters::Kind::kProbe: j["kind"] = "probe"; break;
      case Counters::Kind::kGen: j["kind"] = "gen"; break;
    }
    j["size"] = e.size;
    if (e.kind == Counters::Kind::kProbe) j["map_size"] = e.map_size;
    events.push_back(std::move(j));
  }
  nlohmann::json out;
  out["events"] = std::move(events);
  out["totals"] = {{"build", c.total_build()},
                   {"probe", c.total_probe()},
                   {"gen", c.total_gen()},
                   {"all", c.total()},
                   {"cost_unit_linear", counters_to_cost(c, CostFunctions::unit_linear())}};
  return out;
}

}  // namespace shredjoin
