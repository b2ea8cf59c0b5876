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

// Executors: NSA expressions over shredded relations, and binary hash joins.

#include <set>
#include <unordered_map>

#include "shredjoin/engine.hpp"
#include "shredjoin/errors.hpp"
#include "shredjoin/nsa_ops.hpp"

namespace shredjoin {

namespace {

PhysicalRelation input_relation(const Atom& atom, std::size_t leaf, const InputResolver& inputs) {
  PhysicalRelation bound = inputs(atom, leaf);
  PhysicalRelation out(bound.size());
  for (const auto& a : atom.attrs) out.add_column(bound.column(a));
  return out;
}

ShreddedRelation as_relation(NsaResult r, const NsaNode& n) {
  if (auto* rel = std::get_if<ShreddedRelation>(&r)) return std::move(*rel);
  throw TypeError(to_string(n.op), "operand", "expected a relation, got a dictionary");
}

NsaResult exec(const NsaExpr& e, const InputResolver& inputs, Counters* counters, const TraceHook& trace) {
  const NsaNode& n = *e;
  auto child = [&](std::size_t i) { return as_relation(exec(n.children[i], inputs, counters, trace), n); };
  NsaResult out;
  switch (n.op) {
    case NsaOp::kInput:
      out = shred_flat(input_relation(n.atom, n.leaf, inputs));
      break;
    case NsaOp::kSelect: out = select(child(0), n.predicate); break;
    case NsaOp::kProject: out = project(child(0), n.target); break;
    case NsaOp::kRename: out = rename(child(0), n.renaming); break;
    case NsaOp::kUnion: {
      auto a = child(0);
      out = unite(std::move(a), child(1));
      break;
    }
    case NsaOp::kDifference: {
      auto a = child(0);
      out = difference(a, child(1));
      break;
    }
    case NsaOp::kGroupBy: out = groupby(child(0), n.keys, counters); break;
    case NsaOp::kNSemijoin: {
      auto r = child(0);
      NsaResult d = exec(n.children[1], inputs, counters, trace);
      auto* dict = std::get_if<ShreddedDictionary>(&d);
      if (dict == nullptr) throw TypeError("nsemijoin", to_string(e), "right operand is not a dictionary");
      out = nsemijoin(std::move(r), *dict, counters);
      break;
    }
    case NsaOp::kUnnest: out = unnest(child(0), n.target, counters); break;
    case NsaOp::kFlatten: out = flatten(child(0), counters); break;
  }
  if (trace) trace(n, out);
  return out;
}

}  // namespace

NsaResult execute_nsa(const NsaExpr& e, const InputResolver& inputs, Counters* counters,
                      const TraceHook& trace) {
  infer_scheme(e);
  return exec(e, inputs, counters, trace);
}

ShreddedRelation execute_nsa_relation(const NsaExpr& e, const InputResolver& inputs, Counters* counters,
                                      const TraceHook& trace) {
  return as_relation(execute_nsa(e, inputs, counters, trace), *e);
}

namespace {

PhysicalRelation hash_join(const PhysicalRelation& left, const PhysicalRelation& right,
                           const std::vector<std::string>& keys, Counters* counters) {
  Counters::Scope scope(counters, "hashjoin");
  std::unordered_map<KeyTuple, std::vector<std::size_t>, KeyTupleHash> table;
  table.reserve(right.size());
  for (std::size_t i = 1; i <= right.size(); ++i) table[right.row(i, keys)].push_back(i);
  if (counters != nullptr) counters->record_build(right.size());

  std::vector<std::size_t> pos_l, pos_r;
  for (std::size_t i = 1; i <= left.size(); ++i) {
    auto it = table.find(left.row(i, keys));
    if (it == table.end()) continue;
    for (std::size_t j : it->second) {
      pos_l.push_back(i);
      pos_r.push_back(j);
    }
  }
  if (counters != nullptr) counters->record_probe(left.size(), table.size());

  PhysicalRelation out(pos_l.size());
  for (const auto& c : left.columns()) out.add_column(take(c, pos_l, counters));
  for (const auto& c : right.columns())
    if (!left.has_column(c.name())) out.add_column(take(c, pos_r, counters));
  return out;
}

}  // namespace

PhysicalRelation execute_binary(const BinaryPlan& p, const InputResolver& inputs, Counters* counters) {
  if (p->is_leaf()) return input_relation(p->atom, p->leaf, inputs);
  PhysicalRelation left = execute_binary(p->left, inputs, counters);
  PhysicalRelation right = execute_binary(p->right, inputs, counters);
  return hash_join(left, right, ja(p), counters);
}

const PhysicalRelation& EngineCardinalities::plan_result(const BinaryPlan& p) {
  auto it = plans_.find(p.get());
  if (it != plans_.end()) return it->second;
  pinned_.push_back(p);
  PhysicalRelation r = p->is_leaf() ? input_relation(p->atom, p->leaf, inputs_)
                                    : hash_join(plan_result(p->left), plan_result(p->right), ja(p), nullptr);
  return plans_.emplace(p.get(), std::move(r)).first->second;
}

std::size_t EngineCardinalities::plan_size(const BinaryPlan& p) { return plan_result(p).size(); }

std::size_t EngineCardinalities::plan_keys(const BinaryPlan& p, const std::vector<std::string>& keys) {
  const PhysicalRelation& r = plan_result(p);
  std::set<KeyTuple> distinct;
  for (std::size_t i = 1; i <= r.size(); ++i) distinct.insert(r.row(i, keys));
  return distinct.size();
}

std::size_t EngineCardinalities::expr_size(const NsaExpr& e) {
  auto it = exprs_.find(e.get());
  if (it != exprs_.end()) return it->second;
  pinned_.push_back(e);
  execute_nsa(e, inputs_, nullptr, [this](const NsaNode& n, const NsaResult& r) {
    std::size_t size = std::visit([](const auto& x) { return x.cardinality(); }, r);
    exprs_[&n] = size;
  });
  return exprs_.at(e.get());
}

}  // namespace shredjoin
