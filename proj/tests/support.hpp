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

// Fixtures and random generators shared by the unit and acceptance tests.

#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "shredjoin/engine.hpp"
#include "shredjoin/errors.hpp"
#include "shredjoin/nsa_ops.hpp"
#include "shredjoin/reference.hpp"

namespace testing {

using namespace shredjoin;

inline PhysicalRelation strings(std::vector<std::string> names, std::vector<std::vector<std::string>> rows) {
  std::vector<Column> cols;
  for (std::size_t c = 0; c < names.size(); ++c) {
    std::vector<std::string> data;
    for (const auto& r : rows) data.push_back(r.at(c));
    cols.emplace_back(names[c], std::move(data));
  }
  return PhysicalRelation(std::move(cols));
}

inline PhysicalRelation ints(std::vector<std::string> names, std::vector<std::vector<std::int64_t>> rows) {
  std::vector<Column> cols;
  for (std::size_t c = 0; c < names.size(); ++c) {
    std::vector<std::int64_t> data;
    for (const auto& r : rows) data.push_back(r.at(c));
    cols.emplace_back(names[c], std::move(data));
  }
  if (cols.empty()) return PhysicalRelation(rows.size());
  return PhysicalRelation(std::move(cols));
}

// The running example: R(x,y), S(y,z), T(z,u) with one dangling S tuple.
inline Database running_db() {
  Database db;
  db.put("R", strings({"x", "y"}, {{"x1", "y1"}, {"x2", "y3"}, {"x3", "y3"}}));
  db.put("S", strings({"y", "z"}, {{"y1", "z1"}, {"y2", "z1"}, {"y3", "z2"}, {"y3", "z3"}}));
  db.put("T", strings({"z", "u"}, {{"z1", "u1"}, {"z1", "u2"}, {"z3", "u3"}}));
  return db;
}

inline JoinQuery q3() { return parse_query("Q() :- R(x,y), S(y,z), T(z,u)."); }

inline ShreddedRelation input(const Database& db, const std::string& atom) {
  return shred_flat(bind_atom(db, parse_atom(atom)));
}

// flatten(R semijoin groupby_y(S semijoin groupby_z(T)))
inline NsaExpr two_phase_plan() {
  return nsa::flatten(nsa::nsemijoin(
      nsa::input(parse_atom("R(x,y)"), 0),
      nsa::groupby(nsa::nsemijoin(nsa::input(parse_atom("S(y,z)"), 1),
                                  nsa::groupby(nsa::input(parse_atom("T(z,u)"), 2), {"z"})),
                   {"y"})));
}

// unnest_{u,z}(R semijoin groupby_y(unnest_{u}(S semijoin groupby_z(T))))
inline NsaExpr naive_plan() {
  auto inner = nsa::unnest(nsa::nsemijoin(nsa::input(parse_atom("S(y,z)"), 1),
                                          nsa::groupby(nsa::input(parse_atom("T(z,u)"), 2), {"z"})),
                           Scheme::parse("{u}"));
  return nsa::unnest(nsa::nsemijoin(nsa::input(parse_atom("R(x,y)"), 0), nsa::groupby(inner, {"y"})),
                     Scheme::parse("{u,z}"));
}

// Sample shredded relation over {x,{y},{u,{v}}}, built column by column.
inline ShreddedRelation nested_sample() {
  ShreddedRelation r;
  r.scheme = Scheme::parse("{x,{y},{u,{v}}}");
  r.phys = PhysicalRelation({Column("x", std::vector<std::string>{"a1", "a2"}),
                             Column("hol{y}", std::vector<std::int64_t>{2, 4}),
                             Column("w{y}", std::vector<std::int64_t>{2, 2}),
                             Column("hol{u,{v}}", std::vector<std::int64_t>{2, 3}),
                             Column("w{u,{v}}", std::vector<std::int64_t>{3, 2})});
  r.store[Scheme::parse("{y}")] =
      PhysicalRelation({Column("y", std::vector<std::string>{"b1", "b2", "b1", "b3"}),
                        Column("nxt", std::vector<std::int64_t>{0, 1, 0, 3})});
  r.store[Scheme::parse("{u,{v}}")] =
      PhysicalRelation({Column("u", std::vector<std::string>{"c1", "c2", "c3"}),
                        Column("hol{v}", std::vector<std::int64_t>{2, 3, 5}),
                        Column("w{v}", std::vector<std::int64_t>{2, 1, 2}),
                        Column("nxt", std::vector<std::int64_t>{0, 1, 0})});
  r.store[Scheme::parse("{v}")] =
      PhysicalRelation({Column("v", std::vector<std::string>{"d1", "d2", "d1", "d3", "d4"}),
                        Column("nxt", std::vector<std::int64_t>{0, 1, 0, 0, 4})});
  r.sel = SelectionVector::all(2);
  return r;
}

// ---- random flat instances -----------------------------------------------------

enum class Shape { kChain, kStar, kBushy };

struct RandomInstance {
  JoinQuery query;
  Database db;
};

// Builds a random join tree, then gives each child 1-2 attributes of its
// parent plus private ones. Atom order is shuffled; relation names may repeat
// (self-joins) when arities agree.
inline JoinQuery random_acyclic_query(std::mt19937& rng, std::size_t atoms, Shape shape) {
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  std::size_t fresh = 0;
  auto new_attr = [&] { return "a" + std::to_string(fresh++); };
  std::vector<std::vector<std::string>> attrs(atoms);
  for (std::size_t k = 0; k < 1 + pick(2); ++k) attrs[0].push_back(new_attr());
  for (std::size_t i = 1; i < atoms; ++i) {
    std::size_t parent = shape == Shape::kChain ? i - 1 : shape == Shape::kStar ? 0 : pick(i);
    auto shared = attrs[parent];
    std::shuffle(shared.begin(), shared.end(), rng);
    shared.resize(1 + pick(std::min<std::size_t>(2, shared.size())));
    attrs[i] = shared;
    for (std::size_t k = 0; k < pick(3); ++k) attrs[i].push_back(new_attr());
    std::shuffle(attrs[i].begin(), attrs[i].end(), rng);
  }
  std::vector<std::size_t> order(atoms);
  for (std::size_t i = 0; i < atoms; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);

  JoinQuery q;
  std::map<std::size_t, std::string> by_arity;
  for (std::size_t i : order) {
    std::string name = "R" + std::to_string(i);
    auto it = by_arity.find(attrs[i].size());
    if (it != by_arity.end() && pick(4) == 0) name = it->second;
    by_arity.emplace(attrs[i].size(), name);
    q.atoms.push_back(Atom{name, attrs[i]});
  }
  return q;
}

// Relations of at most `max_rows` rows over integer domains of at most 8
// values, with some rows duplicated.
inline Database random_db(std::mt19937& rng, const JoinQuery& q, std::size_t max_rows = 30,
                          std::int64_t domain = 8) {
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  Database db;
  for (const auto& a : q.atoms) {
    if (db.has(a.relation)) continue;
    std::int64_t dom = 2 + static_cast<std::int64_t>(pick(static_cast<std::size_t>(domain - 1)));
    std::size_t n = pick(max_rows + 1);
    std::vector<std::vector<std::int64_t>> rows;
    for (std::size_t r = 0; r < n; ++r) {
      if (!rows.empty() && pick(5) == 0) {
        rows.push_back(rows[pick(rows.size())]);
        continue;
      }
      std::vector<std::int64_t> row;
      for (std::size_t c = 0; c < a.attrs.size(); ++c)
        row.push_back(static_cast<std::int64_t>(pick(static_cast<std::size_t>(dom))));
      rows.push_back(row);
    }
    std::vector<std::string> cols;
    for (std::size_t c = 0; c < a.attrs.size(); ++c) cols.push_back("c" + std::to_string(c));
    db.put(a.relation, ints(cols, rows));
  }
  return db;
}

inline Shape shape_of(std::size_t i) { return static_cast<Shape>(i % 3); }

// Random bracketing of a random atom permutation: usually ill-behaved.
inline BinaryPlan random_plan(std::mt19937& rng, const JoinQuery& q) {
  std::vector<BinaryPlan> parts;
  for (std::size_t i = 0; i < q.atoms.size(); ++i) parts.push_back(plan::leaf(q.atoms[i], i));
  std::shuffle(parts.begin(), parts.end(), rng);
  while (parts.size() > 1) {
    std::size_t i = std::uniform_int_distribution<std::size_t>(0, parts.size() - 2)(rng);
    parts[i] = plan::join(parts[i], parts[i + 1]);
    parts.erase(parts.begin() + static_cast<std::ptrdiff_t>(i) + 1);
  }
  return parts[0];
}

// Re-roots a join tree at a random node and shuffles child order. The result
// is still a join tree for the same query.
inline JoinTree random_reroot(std::mt19937& rng, const JoinTree& t) {
  std::map<std::size_t, Atom> atom;
  std::map<std::size_t, std::vector<std::size_t>> adj;
  std::function<void(const JoinTree&)> walk = [&](const JoinTree& n) {
    atom[n.index] = n.atom;
    for (const auto& c : n.children) {
      adj[n.index].push_back(c.index);
      adj[c.index].push_back(n.index);
      walk(c);
    }
  };
  walk(t);
  std::vector<std::size_t> ids;
  for (const auto& [i, a] : atom) ids.push_back(i);
  std::size_t root = ids[std::uniform_int_distribution<std::size_t>(0, ids.size() - 1)(rng)];
  std::function<JoinTree(std::size_t, std::size_t)> build = [&](std::size_t n, std::size_t from) {
    JoinTree out{atom[n], n, {}};
    auto next = adj[n];
    std::shuffle(next.begin(), next.end(), rng);
    for (std::size_t c : next)
      if (c != from) out.children.push_back(build(c, n));
    return out;
  };
  return build(root, static_cast<std::size_t>(-1));
}

// ---- random nested values ---------------------------------------------------------

// Random scheme of the given depth; every nested member has a flat attribute
// so the empty scheme never appears.
inline Scheme random_scheme(std::mt19937& rng, std::size_t depth, std::size_t& fresh, const std::string& prefix = "a") {
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  std::vector<std::string> flat;
  for (std::size_t i = 0; i < 1 + pick(2); ++i) flat.push_back(prefix + std::to_string(fresh++));
  std::vector<Scheme> nested;
  if (depth > 0)
    for (std::size_t i = 0; i < pick(3); ++i) nested.push_back(random_scheme(rng, depth - 1, fresh, prefix));
  return Scheme(flat, nested);
}

inline NestedRelationValue random_value(std::mt19937& rng, const Scheme& s, std::size_t min_size,
                                        std::size_t max_size, std::int64_t domain = 3) {
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  NestedRelationValue v;
  v.scheme = s;
  std::size_t n = min_size + pick(max_size - min_size + 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (!v.tuples.empty() && pick(6) == 0) {
      v.tuples.push_back(v.tuples[pick(v.tuples.size())]);
      continue;
    }
    NestedTuple t;
    for (const auto& a : s.flat_members())
      t.flat[a] = static_cast<std::int64_t>(pick(static_cast<std::size_t>(domain)));
    for (const auto& z : s.nested_members()) t.nested[z] = random_value(rng, z, 1, 3, domain);
    v.tuples.push_back(std::move(t));
  }
  return v;
}

// ---- operator soundness ----------------------------------------------------------

inline const std::vector<std::string>& soundness_ops() {
  static const std::vector<std::string> ops{"groupby", "nsemijoin", "unnest",  "flatten",   "select",
                                            "project", "rename",    "union",   "difference"};
  return ops;
}

// One randomized round: runs `op` on a shredded input (randomly padded with
// invalid rows) and compares against the reference operator. Returns an
// empty string on success, otherwise a description of the failure.
inline std::string soundness_failure(std::mt19937& rng, const std::string& op) {
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  auto coin = [&] { return pick(2) == 0; };
  std::size_t fresh = 0;
  Scheme x = random_scheme(rng, 3, fresh);
  if (op == "unnest")
    while (x.is_flat()) x = random_scheme(rng, 3, fresh);
  if (op == "difference") x = random_scheme(rng, 0, fresh);
  NestedRelationValue v = random_value(rng, x, 0, 30);
  ShreddedRelation in = shred_nested(v, coin());

  auto check_rel = [&](const ShreddedRelation& got, const NestedRelationValue& want) -> std::string {
    auto problems = validate(got);
    if (!problems.empty())
      return op + " on " + x.str() + ": invariant '" + problems[0].invariant + "' broken at " + problems[0].location;
    auto decoded = unshred(got);
    if (!bag_equal(decoded, want))
      return op + " on " + x.str() + ": got " + decoded.canonical() + " want " + want.canonical();
    return "";
  };

  if (op == "groupby") {
    auto keys = x.flat_members();
    std::shuffle(keys.begin(), keys.end(), rng);
    keys.resize(1 + pick(keys.size()));
    if (keys.size() == x.width()) keys.pop_back();
    if (keys.empty()) return "";
    auto d = groupby(in, keys);
    auto problems = validate(d);
    if (!problems.empty()) return "groupby: invariant '" + problems[0].invariant + "' broken";
    auto want = ref::groupby(v, keys);
    if (!dict_equal(unshred(d), want))
      return "groupby on " + x.str() + ": got " + unshred(d).canonical() + " want " + want.canonical();
    return "";
  }
  if (op == "nsemijoin") {
    auto keys = x.flat_members();
    std::shuffle(keys.begin(), keys.end(), rng);
    keys.resize(1 + pick(std::min<std::size_t>(2, keys.size())));
    std::size_t other = 0;
    Scheme extra = random_scheme(rng, 2, other, "b");
    auto flat = keys;
    for (const auto& f : extra.flat_members()) flat.push_back(f);
    Scheme ws(flat, extra.nested_members());
    NestedRelationValue w = random_value(rng, ws, 0, 30);
    auto d = groupby(shred_nested(w, coin()), keys);
    return check_rel(nsemijoin(in, d), ref::nsemijoin(v, ref::groupby(w, keys)));
  }
  if (op == "unnest") {
    const Scheme& y = x.nested_members()[pick(x.nested_members().size())];
    return check_rel(unnest(in, y), ref::unnest(v, y));
  }
  if (op == "flatten") return check_rel(flatten(in), ref::flatten(v));
  if (op == "select") {
    const auto& f = x.flat_members();
    Comparison c;
    c.lhs = f[pick(f.size())];
    c.op = static_cast<CmpOp>(pick(6));
    if (f.size() > 1 && coin())
      c.rhs = Comparison::AttrRef{f[pick(f.size())]};
    else
      c.rhs = Value(static_cast<std::int64_t>(pick(3)));
    Predicate p{{c}};
    return check_rel(select(in, p), ref::select(v, p));
  }
  if (op == "project") {
    std::vector<std::string> flat;
    std::vector<Scheme> nested;
    for (const auto& f : x.flat_members())
      if (coin()) flat.push_back(f);
    for (const auto& z : x.nested_members())
      if (coin()) nested.push_back(z);
    if (flat.empty() && nested.empty()) flat.push_back(x.flat_members()[0]);
    Scheme keep(flat, nested);
    return check_rel(project(in, keep), ref::project(v, keep));
  }
  if (op == "rename") {
    std::map<std::string, std::string> renaming;
    std::size_t k = 0;
    for (const auto& a : flat_attrs(x))
      if (coin()) renaming[a] = "r" + std::to_string(k++);
    return check_rel(rename(in, renaming), ref::rename(v, renaming));
  }
  if (op == "union") {
    NestedRelationValue v2 = random_value(rng, x, 0, 30);
    return check_rel(unite(in, shred_nested(v2, coin())), ref::unite(v, v2));
  }
  if (op == "difference") {
    NestedRelationValue v2 = random_value(rng, x, 0, 10);
    for (const auto& t : v.tuples)
      if (coin()) v2.tuples.push_back(t);
    return check_rel(difference(in, shred_nested(v2)), ref::difference(v, v2));
  }
  return "unknown operator " + op;
}

// ---- exhaustive repair oracle -------------------------------------------------

// Every (root, penalty) pair reachable by some admissible assignment of roots
// to subplans, without pruning.
inline std::vector<std::pair<const PlanNode*, std::size_t>> all_root_assignments(
    const BinaryPlan& p, const LeafCardinality& card) {
  if (p->is_leaf()) return {{p.get(), 0}};
  auto j = ja(p);
  auto covers = [&](const PlanNode* a) {
    std::set<std::string> s(a->atom.attrs.begin(), a->atom.attrs.end());
    return !j.empty() && std::all_of(j.begin(), j.end(), [&](const std::string& x) { return s.count(x) != 0; });
  };
  auto left = all_root_assignments(p->left, card);
  auto right = all_root_assignments(p->right, card);
  std::vector<std::pair<const PlanNode*, std::size_t>> out;
  // Attaching one side's tree below the other needs a node covering ja on
  // both sides.
  auto side_covers = [&](const BinaryPlan& side) {
    auto ls = leaves(side);
    return std::any_of(ls.begin(), ls.end(), covers);
  };
  if (!side_covers(p->left) || !side_covers(p->right)) return out;
  for (const auto& [a, da] : left)
    for (const auto& [b, db] : right)
      if (covers(b)) out.emplace_back(a, da + db);
  for (const auto& [a, da] : right)
    for (const auto& [b, db] : left)
      if (covers(b)) out.emplace_back(a, da + db + card(*b));
  return out;
}

// Minimum penalty over assignments whose root covers ja of the whole plan;
// -1 when none exists.
inline long long exhaustive_min_penalty(const BinaryPlan& p, const LeafCardinality& card) {
  if (p->is_leaf()) return 0;
  auto j = ja(p);
  long long best = -1;
  for (const auto& [a, d] : all_root_assignments(p, card)) {
    std::set<std::string> s(a->atom.attrs.begin(), a->atom.attrs.end());
    if (!std::all_of(j.begin(), j.end(), [&](const std::string& x) { return s.count(x) != 0; })) continue;
    if (best < 0 || static_cast<long long>(d) < best) best = static_cast<long long>(d);
  }
  return best;
}

inline std::multiset<std::size_t> tree_indices(const JoinTree& t) {
  std::multiset<std::size_t> out{t.index};
  for (const auto& c : t.children) out.merge(tree_indices(c));
  return out;
}

}  // namespace testing
